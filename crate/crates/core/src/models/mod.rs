//! Concrete scenarios: closed-form conditions next to brute-force simulation.

pub mod beamsplitter;
pub mod dicke;
pub mod families;
pub mod field;
pub mod jc;
pub mod lur;
pub mod tavis;
pub mod threshold;

pub use field::FieldSpec;
pub use threshold::{threshold_scan, try_threshold_scan};
