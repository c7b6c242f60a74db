//! Local-uncertainty instances: a two-mode squeezed state with `A = a`, `B = b†`,
//! and an atom–field superposition with `A = a†`, `B = σ⁺`. Both have separable bound 1.

use crate::error::{Error, Result};
use crate::hilbert::{embed, Factor, SpaceSignature, State, StateVector};
use crate::linalg::{cr, C64};
use crate::optics::{annihilator, qubit_ops, superposition, two_mode_squeezed};
use crate::witness::{lur_value, LurReport};

pub const LUR_BOUND: f64 = 1.0;

/// Which sign of the squeezing parameter is used to build the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqueezeBranch {
    /// `exp(r(a†b† − ab))|0,0⟩` as written: amplitudes `tanhⁿ r / cosh r`.
    Literal,
    /// `exp(−r(a†b† − ab))|0,0⟩`: amplitudes `(−tanh r)ⁿ / cosh r`.
    Correlating,
}

/// `Σ ⟨(A+B)†(A+B)⟩ − |⟨A+B⟩|²` for `A = a`, `B = b†` on a two-mode squeezed state.
pub fn two_mode_squeezed_lur(r: f64, dim: usize, branch: SqueezeBranch) -> Result<LurReport> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("squeezing r = {r} must be ≥ 0")));
    }
    let signed = match branch {
        SqueezeBranch::Literal => r,
        SqueezeBranch::Correlating => -r,
    };
    let sig = SpaceSignature::new(vec![Factor::boson("a", dim), Factor::boson("b", dim)])?;
    let psi = StateVector::new(sig.clone(), two_mode_squeezed(signed, dim)?)?;
    let a = embed(&annihilator(dim)?, "a", &sig)?;
    let bd = embed(&annihilator(dim)?.adjoint(), "b", &sig)?;
    lur_value(&psi.into(), &[(a, bd)], LUR_BOUND)
}

/// `e^{∓2r}` for the correlating and literal branches.
pub fn two_mode_squeezed_closed(r: f64, branch: SqueezeBranch) -> f64 {
    match branch {
        SqueezeBranch::Literal => (2.0 * r).exp(),
        SqueezeBranch::Correlating => (-2.0 * r).exp(),
    }
}

/// `cos θ|e,0⟩ + e^{iφ} sin θ|g,1⟩` on atom ⊗ field (field truncated at 3).
pub fn atom_field_lur(theta: f64, phi: f64) -> Result<LurReport> {
    let sig = SpaceSignature::new(vec![Factor::qubit("atom"), Factor::boson("field", 3)])?;
    let psi = superposition(
        &sig,
        &[(cr(theta.cos()), &[1, 0]), (C64::from_polar(theta.sin(), phi), &[0, 1])],
    )?;
    let ad = embed(&annihilator(3)?.adjoint(), "field", &sig)?;
    let sp = embed(&qubit_ops().sigma_plus, "atom", &sig)?;
    lur_value(&State::from(psi), &[(ad, sp)], LUR_BOUND)
}

/// `1 + 2 sin²θ + 2 sin θ cos θ cos φ`
pub fn atom_field_closed(theta: f64, phi: f64) -> f64 {
    1.0 + 2.0 * theta.sin().powi(2) + 2.0 * theta.sin() * theta.cos() * phi.cos()
}

/// Violation interval in `θ ∈ (−π/2, π/2)` at one relative phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWindow {
    pub phi: f64,
    /// Endpoints of the grid interval where the bound is violated, if any.
    pub window: Option<(f64, f64)>,
    /// Smallest value seen on the θ grid.
    pub min_value: f64,
}

/// Scan `θ` for each phase and report where the atom–field value drops below 1.
///
/// The violation set at fixed `φ` is the interval between 0 and `atan(−cos φ)`.
pub fn atom_field_phase_scan(phis: &[f64], theta_points: usize) -> Result<Vec<PhaseWindow>> {
    if theta_points < 3 {
        return Err(Error::InvalidParameter("need at least 3 θ points".into()));
    }
    let half = std::f64::consts::FRAC_PI_2;
    phis.iter()
        .map(|&phi| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut min_value = f64::INFINITY;
            for j in 1..theta_points - 1 {
                let theta = -half + std::f64::consts::PI * j as f64 / (theta_points - 1) as f64;
                let rep = atom_field_lur(theta, phi)?;
                min_value = min_value.min(rep.value);
                if rep.entangled {
                    lo = lo.min(theta);
                    hi = hi.max(theta);
                }
            }
            Ok(PhaseWindow {
                phi,
                window: (lo <= hi).then_some((lo, hi)),
                min_value,
            })
        })
        .collect()
}

/// Exact violation interval at phase `φ`: between 0 and `atan(−cos φ)`.
pub fn atom_field_window(phi: f64) -> Option<(f64, f64)> {
    let edge = (-phi.cos()).atan();
    if edge.abs() < 1e-15 {
        None
    } else {
        Some((edge.min(0.0), edge.max(0.0)))
    }
}
