//! Jaynes–Cummings atom in a thermal field: time trace of the `2×2` witness
//! matrix built from `A = σ⁻` and the field basis `{Δa, Δa†}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{embed, DensityMatrix, Factor, LabeledOperator, Propagator, SpaceSignature, State};
use crate::linalg::{cr, kron};
use crate::optics::{annihilator, delta, number, qubit_ops, thermal, thermal_dim};
use crate::witness::witness_matrix_expand_b;

/// Discarded thermal weight allowed by [`JcConfig::validate`].
pub const THERMAL_TAIL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomInit {
    Excited,
    Ground,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JcConfig {
    pub omega: f64,
    pub kappa: f64,
    pub nbar: f64,
    pub fock_dim: usize,
    /// Times in units of `1/κ`.
    pub kt_grid: Vec<f64>,
    pub atom: AtomInit,
}

impl JcConfig {
    /// `ω = 1`, `κ = 0.1`, excited atom, `fock_dim = 20`.
    pub fn new(nbar: f64, kt_grid: Vec<f64>) -> Self {
        JcConfig {
            omega: 1.0,
            kappa: 0.1,
            nbar,
            fock_dim: 20,
            kt_grid,
            atom: AtomInit::Excited,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa.is_finite() && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need κ > 0 and finite ω, got κ = {}, ω = {}",
                self.kappa, self.omega
            )));
        }
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("n̄ = {} must be ≥ 0", self.nbar)));
        }
        let needed = thermal_dim(self.nbar, THERMAL_TAIL).max(3);
        if self.fock_dim < needed {
            return Err(Error::InvalidParameter(format!(
                "fock_dim {} leaves a thermal tail above {THERMAL_TAIL:e} at n̄ = {}; need at least {needed}",
                self.fock_dim, self.nbar
            )));
        }
        if self.kt_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }
}

/// One time point of the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcPoint {
    pub kt: f64,
    pub m11: f64,
    pub m22: f64,
    pub abs_m12: f64,
    pub lambda_max: f64,
    /// Field population in the top two Fock levels.
    pub leakage: f64,
}

/// Field ⊗ atom signature.
pub fn jc_signature(fock_dim: usize) -> Result<SpaceSignature> {
    SpaceSignature::new(vec![Factor::boson("field", fock_dim), Factor::qubit("atom")])
}

/// `H = ω a†a + (ω/2)σ^z + κ(σ⁺a + σ⁻a†)`.
pub fn jc_hamiltonian(sig: &SpaceSignature, omega: f64, kappa: f64) -> Result<LabeledOperator> {
    let dim = sig.dim_of("field")?;
    let q = qubit_ops();
    let n = embed(&number(dim)?, "field", sig)?;
    let a = embed(&annihilator(dim)?, "field", sig)?;
    let sz = embed(&q.sigma_z, "atom", sig)?;
    let sp = embed(&q.sigma_plus, "atom", sig)?;
    let hop = &(&sp * &a) + &(&sp * &a).adjoint();
    Ok(&(&n.scale(cr(omega)) + &sz.scale(cr(omega / 2.0))) + &hop.scale(cr(kappa)))
}

/// `ρ(0) = ρ_thermal ⊗ |atom⟩⟨atom|`.
pub fn jc_initial_state(cfg: &JcConfig, sig: &SpaceSignature) -> Result<DensityMatrix> {
    let atom = match cfg.atom {
        AtomInit::Excited => qubit_ops().p_e,
        AtomInit::Ground => {
            let q = qubit_ops();
            q.sigma_minus.clone() * q.sigma_plus.clone()
        }
    };
    DensityMatrix::new(sig.clone(), kron(&thermal(cfg.nbar, cfg.fock_dim)?, &atom))
}

/// Evolve the thermal-field state and evaluate the witness matrix at each grid time.
pub fn jc_witness_trace(cfg: &JcConfig) -> Result<Vec<JcPoint>> {
    cfg.validate()?;
    let sig = jc_signature(cfg.fock_dim)?;
    let prop = Propagator::new(&jc_hamiltonian(&sig, cfg.omega, cfg.kappa)?)?;
    let rho0: State = jc_initial_state(cfg, &sig)?.into();
    let sm = embed(&qubit_ops().sigma_minus, "atom", &sig)?;
    let a = embed(&annihilator(cfg.fock_dim)?, "field", &sig)?;
    cfg.kt_grid
        .par_iter()
        .map(|&kt| {
            let state = prop.evolve(kt / cfg.kappa, &rho0)?;
            let da = delta(&a, &state)?;
            let m = witness_matrix_expand_b(&state, &sm, &[da.clone(), da.adjoint()])?;
            Ok(JcPoint {
                kt,
                m11: m.matrix[(0, 0)].re,
                m22: m.matrix[(1, 1)].re,
                abs_m12: m.matrix[(0, 1)].norm(),
                lambda_max: m.lambda_max()?,
                leakage: state.leakage("field")?,
            })
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|points| {
            if let Some(p) = points.iter().find(|p| p.leakage >= crate::hilbert::LEAKAGE_LIMIT) {
                return Err(Error::Leakage {
                    leakage: p.leakage,
                    limit: crate::hilbert::LEAKAGE_LIMIT,
                    dim: cfg.fock_dim,
                });
            }
            Ok(points)
        })
}

/// Vacuum field, excited atom: `M₁₁ = sin²(κt) cos²(κt)`.
pub fn jc_vacuum_m11(kt: f64) -> f64 {
    (kt.sin() * kt.cos()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, max: f64) -> Vec<f64> {
        (0..n).map(|k| max * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn vacuum_closed_form() {
        let cfg = JcConfig::new(0.0, grid(41, 6.0));
        for p in jc_witness_trace(&cfg).unwrap() {
            assert!((p.m11 - jc_vacuum_m11(p.kt)).abs() < 1e-10, "{p:?}");
            assert!(p.m22 <= 1e-12);
            assert!(p.abs_m12 < 1e-12);
        }
    }

    #[test]
    fn thermal_trace_properties() {
        let kts = grid(61, 6.0);
        let mut at_224 = Vec::new();
        for nbar in [0.01, 0.02, 0.03] {
            let mut pts = jc_witness_trace(&JcConfig::new(nbar, kts.clone())).unwrap();
            assert!(pts.iter().all(|p| p.abs_m12 < 1e-9 && p.m22 <= 1e-9));
            assert!(pts.iter().any(|p| p.m11 > 0.0));
            pts = jc_witness_trace(&JcConfig::new(nbar, vec![2.24])).unwrap();
            at_224.push(pts[0].m11);
        }
        assert!(at_224[0] > at_224[1] && at_224[1] > at_224[2], "{at_224:?}");
    }

    #[test]
    fn ground_atom_and_validation() {
        let mut cfg = JcConfig::new(0.0, vec![0.0, 1.0]);
        cfg.atom = AtomInit::Ground;
        for p in jc_witness_trace(&cfg).unwrap() {
            assert!(p.m11.abs() < 1e-14 && p.lambda_max.abs() < 1e-12);
        }
        let mut bad = JcConfig::new(0.5, vec![0.0]);
        bad.fock_dim = 10;
        assert!(matches!(jc_witness_trace(&bad), Err(Error::InvalidParameter(_))));
    }
}
