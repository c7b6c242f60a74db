//! Two beam splitters in cascade: the input mode `a` is mixed with vacuum `b`,
//! then with vacuum `c`. Output modes `b` and `c` end up entangled for suitable inputs.
//!
//! `|ψ_out⟩ = U₂(a,c) U₁(a,b) |ψ_in, 0, 0⟩`, with each splitter as in
//! [`crate::optics::beamsplitter_unitary`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Factor, SpaceSignature, State, StateVector};
use crate::linalg::{cr, ComplexMatrix};
use crate::optics::{apply_beamsplitter, fock, lowering};
use crate::witness::{
    cond1, eig2_positive, ppt_min_eig, witness_matrix_expand_a_named, witness_tolerance, WitnessMatrix, WitnessReport,
};

use super::field::{FieldMoments, FieldSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsConfig {
    pub t1: f64,
    pub r1: f64,
    pub t2: f64,
    pub r2: f64,
    pub input: FieldSpec,
    pub fock_dim: usize,
}

impl BsConfig {
    /// Balanced splitters, `fock_dim = 12`.
    pub fn balanced(input: FieldSpec) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        BsConfig {
            t1: h,
            r1: h,
            t2: h,
            r2: h,
            input,
            fock_dim: 12,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (t, r) in [(self.t1, self.r1), (self.t2, self.r2)] {
            if t < 0.0 || r < 0.0 || (t * t + r * r - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "need t, r ≥ 0 with t² + r² = 1, got t = {t}, r = {r}"
                )));
            }
        }
        if self.fock_dim < 2 {
            return Err(Error::InvalidParameter(format!("fock_dim {} < 2", self.fock_dim)));
        }
        Ok(())
    }

    /// `K = r₁ t₁ r₂`
    pub fn gain(&self) -> f64 {
        self.r1 * self.t1 * self.r2
    }
}

/// Closed-form tests from input moments.
#[derive(Debug, Clone, PartialEq)]
pub struct BsConditions {
    pub moments: FieldMoments,
    /// `⟨n⟩ − Δ²n`; positive (sub-Poissonian) means entangled.
    pub simple_margin: f64,
    pub simple_entangled: bool,
    /// Matrix in the basis `{b†, b}` with `B = c`.
    pub matrix: WitnessMatrix,
    /// `|M₁₂|² − M₁₁M₂₂`
    pub det_margin: f64,
    /// `|M₁₂|² > M₁₁M₂₂`
    pub matrix_condition: bool,
    /// `λ_max(M) > 0`
    pub matrix_positive: bool,
    /// The two sides of the matrix condition with the `K⁴` factor removed.
    pub reduced_lhs: f64,
    pub reduced_rhs: f64,
}

/// `M₁₁ = K²[|⟨a²⟩|² − ⟨n²⟩ + (1 − 1/r₁²)⟨n⟩]`, `M₁₂ = K²(⟨a²⟩⟨n⟩ − ⟨na²⟩)`,
/// `M₂₂ = K²(⟨n⟩ − Δ²n)`.
pub fn closed_matrix(m: &FieldMoments, r1: f64, gain: f64) -> Result<ComplexMatrix> {
    if r1 == 0.0 {
        return Err(Error::InvalidParameter("r₁ = 0 decouples the input".into()));
    }
    let k2 = gain * gain;
    let m11 = k2 * (m.a2.norm_sqr() - m.n2 + (1.0 - 1.0 / (r1 * r1)) * m.n);
    let m12 = (m.a2 * m.n - m.na2) * k2;
    let m22 = k2 * (m.n - m.variance());
    Ok(ComplexMatrix::from_row_slice(
        2,
        2,
        &[cr(m11), m12, m12.conj(), cr(m22)],
    ))
}

pub fn bs_conditions(cfg: &BsConfig) -> Result<BsConditions> {
    cfg.validate()?;
    let gain = cfg.gain();
    if gain == 0.0 {
        return Err(Error::InvalidParameter(
            "r₁ t₁ r₂ = 0: the outputs carry no correlations".into(),
        ));
    }
    let (field, _) = cfg.input.resolve(cfg.fock_dim)?;
    let m = FieldMoments::of(&field);
    let simple_margin = m.n - m.variance();
    let raw = closed_matrix(&m, cfg.r1, gain)?;
    let matrix = WitnessMatrix::new(raw.clone(), vec!["b†".into(), "b".into()], vec![])?;
    let det_margin = raw[(0, 1)].norm_sqr() - raw[(0, 0)].re * raw[(1, 1)].re;
    let reduced_lhs = (m.a2 * m.n - m.na2).norm_sqr();
    let reduced_rhs = simple_margin * (m.a2.norm_sqr() - m.n2 + (1.0 - 1.0 / (cfg.r1 * cfg.r1)) * m.n);
    Ok(BsConditions {
        moments: m,
        simple_margin,
        simple_entangled: simple_margin > witness_tolerance(m.variance()),
        matrix_condition: det_margin > witness_tolerance(raw[(0, 0)].re * raw[(1, 1)].re),
        matrix_positive: eig2_positive(&raw)?,
        matrix,
        det_margin,
        reduced_lhs,
        reduced_rhs,
    })
}

/// Tests evaluated directly on the simulated `bc` output marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct BsSimulation {
    /// `A = b`, `B = c`
    pub cond1: WitnessReport,
    pub matrix: WitnessMatrix,
    pub matrix_condition: bool,
    pub matrix_positive: bool,
    pub ppt_min_eig: f64,
    pub leakage: f64,
    /// `⟨n_a + n_b + n_c⟩` after the splitters.
    pub photons_out: f64,
}

/// Output state `U₂(a,c) U₁(a,b)|ψ_in, 0, 0⟩` on three modes truncated at `fock_dim`.
pub fn bs_output(cfg: &BsConfig) -> Result<StateVector> {
    cfg.validate()?;
    let d = cfg.fock_dim;
    let sig = SpaceSignature::new(vec![
        Factor::boson("a", d),
        Factor::boson("b", d),
        Factor::boson("c", d),
    ])?;
    let psi = StateVector::product(sig, &[cfg.input.vector(d)?, fock(0, d)?, fock(0, d)?])?;
    let psi = apply_beamsplitter(&psi, cfg.t1, cfg.r1, ("a", "b"))?;
    apply_beamsplitter(&psi, cfg.t2, cfg.r2, ("a", "c"))
}

pub fn bs_simulate(cfg: &BsConfig) -> Result<BsSimulation> {
    let out = bs_output(cfg)?;
    let leakage = ["a", "b", "c"]
        .iter()
        .map(|m| out.leakage(m))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let photons_out = ["a", "b", "c"]
        .iter()
        .map(|m| {
            Ok(out
                .populations(m)?
                .iter()
                .enumerate()
                .map(|(k, p)| k as f64 * p)
                .sum::<f64>())
        })
        .sum::<Result<f64>>()?;
    let rho = out.reduced(&["b", "c"])?;
    let sig = rho.signature().clone();
    let state: State = rho.clone().into();
    let b = lowering(&sig, "b")?;
    let c = lowering(&sig, "c")?;
    let matrix = witness_matrix_expand_a_named(&state, &[b.adjoint(), b.clone()], &c, vec!["b†".into(), "b".into()])?;
    let raw = &matrix.matrix;
    let det_margin = raw[(0, 1)].norm_sqr() - raw[(0, 0)].re * raw[(1, 1)].re;
    Ok(BsSimulation {
        cond1: cond1(&state, &b, &c)?,
        matrix_condition: det_margin > witness_tolerance(raw[(0, 0)].re * raw[(1, 1)].re),
        matrix_positive: eig2_positive(raw)?,
        ppt_min_eig: ppt_min_eig(&rho, &["b"])?,
        matrix,
        leakage,
        photons_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};
    use std::f64::consts::SQRT_2;

    fn both(cfg: &BsConfig) -> (BsConditions, BsSimulation) {
        (bs_conditions(cfg).unwrap(), bs_simulate(cfg).unwrap())
    }

    #[test]
    fn closed_matrix_matches_simulation() {
        let inputs = [
            FieldSpec::Fock { n: 1 },
            FieldSpec::Fock { n: 2 },
            FieldSpec::coherent(c(0.6, 0.3)),
            FieldSpec::squeezed(0.3),
            FieldSpec::epsilon_state(-0.02).unwrap(),
            FieldSpec::custom(&[c(0.3, 0.0), c(0.0, 0.4), c(0.5, -0.2), c(0.1, 0.1)]),
        ];
        let (t1, t2) = (0.8f64, 0.35f64);
        for input in inputs {
            let cfg = BsConfig {
                t1,
                r1: (1.0 - t1 * t1).sqrt(),
                t2,
                r2: (1.0 - t2 * t2).sqrt(),
                input,
                fock_dim: 14,
            };
            let (cl, sim) = both(&cfg);
            assert!(
                max_abs_diff(&cl.matrix.matrix, &sim.matrix.matrix) < 1e-9,
                "{:?}",
                cfg.input
            );
            let k2 = cfg.gain().powi(2);
            assert!((sim.cond1.margin - k2 * cl.simple_margin).abs() < 1e-9);
            assert!((cl.det_margin - k2 * k2 * (cl.reduced_lhs - cl.reduced_rhs)).abs() < 1e-12);
        }
    }

    #[test]
    fn fock_and_coherent_inputs() {
        let (cl, sim) = both(&BsConfig::balanced(FieldSpec::Fock { n: 1 }));
        assert!(cl.simple_entangled && sim.cond1.entangled && sim.ppt_min_eig < -1e-10);
        assert!((sim.photons_out - 1.0).abs() < 1e-14);
        // the partial transpose sees the truncated tail at square-root order, hence the larger space
        let mut cfg = BsConfig::balanced(FieldSpec::coherent(c(0.7, 0.0)));
        cfg.fock_dim = 20;
        let (cl, sim) = both(&cfg);
        assert!(!cl.simple_entangled && !cl.matrix_positive && !cl.matrix_condition);
        assert!(!sim.cond1.entangled && !sim.matrix_positive);
        assert!(sim.ppt_min_eig > -1e-10);
    }

    #[test]
    fn epsilon_state_needs_matrix_condition() {
        let eps = -0.02;
        let (cl, sim) = both(&BsConfig::balanced(FieldSpec::epsilon_state(eps).unwrap()));
        assert!(cl.simple_margin < 0.0 && !cl.simple_entangled && !sim.cond1.entangled);
        assert!(cl.matrix_condition && sim.matrix_condition && sim.ppt_min_eig < -1e-10);
        assert!((cl.reduced_lhs - 0.4444).abs() < 1e-4 && (cl.reduced_rhs - 0.1229).abs() < 1e-4);
        // lowest order: Δ²n − ⟨n⟩ ≈ −2√2 ε
        for e in [1e-3, -1e-3, 1e-4] {
            let m = FieldMoments::of(&FieldSpec::epsilon_state(e).unwrap().vector(6).unwrap());
            assert!(((m.variance() - m.n) + 2.0 * SQRT_2 * e).abs() < 20.0 * e * e);
        }
    }

    #[test]
    fn degenerate_splitters_rejected() {
        let mut cfg = BsConfig::balanced(FieldSpec::Fock { n: 1 });
        cfg.t1 = 1.0;
        cfg.r1 = 0.0;
        assert!(bs_conditions(&cfg).is_err());
        cfg.t1 = 0.5;
        assert!(cfg.validate().is_err());
    }
}
