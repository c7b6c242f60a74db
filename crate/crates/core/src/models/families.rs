//! Small bipartite families with known thresholds: noisy two-term states,
//! the correlated-subspace example, the `|ψ₀₁⟩` family used by the bilinear
//! criterion, and the states used to probe Gaussian invariance.

use rand::Rng;

use crate::error::{Error, Result};
use crate::hilbert::{embed, escalate, DensityMatrix, Factor, LabeledOperator, SpaceSignature, State, StateVector};
use crate::linalg::{basis_vector, c, cr, kron_vec, outer, ComplexMatrix, ComplexVector, C64};
use crate::optics::{delta, lowering, polar, qubit_ops, squeeze, superposition, GaussianParams};
use crate::witness::{
    bilinear_x, cond1, product_vector_scan, random_vector, witness_matrix_expand_a, witness_matrix_expand_b,
    WitnessMatrix, WitnessReport,
};

use super::threshold::try_threshold_scan;

fn ket_bra(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    outer(&basis_vector(dim, i), &basis_vector(dim, j))
}

fn white_noise(sig: &SpaceSignature) -> DensityMatrix {
    let n = sig.total_dim();
    DensityMatrix::from_matrix_unchecked(sig.clone(), ComplexMatrix::identity(n, n) * cr(1.0 / n as f64))
}

fn check_mixing(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("mixing weight s = {s} outside [0, 1]")));
    }
    Ok(())
}

/// `ρ(s) = s|ψ⟩⟨ψ| + (1−s) I/4` with `|ψ⟩ = c₁|α₁β₁⟩ + c₂|α₂β₂⟩` on two qubits,
/// tested with `A = |α₁⟩⟨α₂|`, `B = |β₂⟩⟨β₁|`.
#[derive(Debug, Clone)]
pub struct NoisyBell {
    signature: SpaceSignature,
    psi: StateVector,
    a: LabeledOperator,
    b: LabeledOperator,
}

impl NoisyBell {
    pub fn new(c1: C64, c2: C64) -> Result<Self> {
        let signature = SpaceSignature::new(vec![Factor::qubit("a"), Factor::qubit("b")])?;
        let norm = (c1.norm_sqr() + c2.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("|c₁|² + |c₂|² = {} ≠ 1", norm * norm)));
        }
        let psi = superposition(&signature, &[(c1, &[0, 0]), (c2, &[1, 1])])?;
        let a = embed(&ket_bra(2, 0, 1), "a", &signature)?;
        let b = embed(&ket_bra(2, 1, 0), "b", &signature)?;
        Ok(NoisyBell { signature, psi, a, b })
    }

    /// Real amplitudes `c₁`, `c₂ = √(1 − c₁²)`.
    pub fn real(c1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c1) {
            return Err(Error::InvalidParameter(format!("c₁ = {c1} outside [0, 1]")));
        }
        Self::new(cr(c1), cr((1.0 - c1 * c1).sqrt()))
    }

    pub fn state(&self, s: f64) -> Result<State> {
        check_mixing(s)?;
        Ok(DensityMatrix::mixture(&[(s, self.psi.to_density()), (1.0 - s, white_noise(&self.signature))])?.into())
    }

    pub fn operators(&self) -> (&LabeledOperator, &LabeledOperator) {
        (&self.a, &self.b)
    }

    pub fn report(&self, s: f64) -> Result<WitnessReport> {
        cond1(&self.state(s)?, &self.a, &self.b)
    }

    /// `|c₁c₂|²`
    pub fn overlap(&self) -> f64 {
        let amps = self.psi.amplitudes();
        (amps[0] * amps[3]).norm_sqr()
    }

    /// Closed-form margin `s²|c₁c₂|² − (1−s)/4`.
    pub fn closed_margin(&self, s: f64) -> f64 {
        s * s * self.overlap() - (1.0 - s) / 4.0
    }

    pub fn closed_threshold(&self) -> f64 {
        noisy_bell_threshold(self.overlap())
    }

    pub fn threshold(&self, tol: f64) -> Result<f64> {
        try_threshold_scan(|s| Ok(self.report(s)?.entangled), 0.0, 1.0, tol)
    }
}

/// Positive root of `4x s² + s − 1 = 0`, `x = |c₁c₂|²`.
pub fn noisy_bell_threshold(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    ((1.0 + 16.0 * x).sqrt() - 1.0) / (8.0 * x)
}

/// `s|ψ⟩⟨ψ| + (1−s)ρ₀` on `3⊗3` with `|ψ⟩ = (|00⟩ + |11⟩)/√2` and `ρ₀` supported
/// on products involving level 2 only, away from the four `|α_iβ_j⟩`.
/// The `A = |0⟩⟨1|`, `B = |1⟩⟨0|` test fires for every `s > 0`.
pub fn outside_support_state(s: f64) -> Result<(State, LabeledOperator, LabeledOperator)> {
    check_mixing(s)?;
    let sig = SpaceSignature::new(vec![Factor::boson("a", 3), Factor::boson("b", 3)])?;
    let psi = superposition(&sig, &[(cr(1.0), &[0, 0]), (cr(1.0), &[1, 1])])?;
    let noise: Vec<(f64, DensityMatrix)> = [[2, 2], [2, 0], [0, 2], [2, 1], [1, 2]]
        .iter()
        .map(|lv| Ok((0.2, StateVector::basis(sig.clone(), lv)?.to_density())))
        .collect::<Result<_>>()?;
    let rho0 = DensityMatrix::mixture(&noise)?;
    let rho = DensityMatrix::mixture(&[(s, psi.to_density()), (1.0 - s, rho0)])?;
    let a = embed(&ket_bra(3, 0, 1), "a", &sig)?;
    let b = embed(&ket_bra(3, 1, 0), "b", &sig)?;
    Ok((rho.into(), a, b))
}

/// `ρ(s) = s|ψ⟩⟨ψ| + (1−s) I/8` on `4⊗2`, `|ψ⟩ = (|v₁⟩|β₁⟩ + |v₂⟩|β₂⟩)/√2` with
/// `|v₁⟩ ∈ span{α₁, α₂}` and `|v₂⟩ ∈ span{α₃, α₄}`.
#[derive(Debug, Clone)]
pub struct CorrelatedSubspace {
    signature: SpaceSignature,
    psi: StateVector,
    basis: Vec<LabeledOperator>,
    b: LabeledOperator,
}

impl CorrelatedSubspace {
    pub fn new(v1: &ComplexVector, v2: &ComplexVector) -> Result<Self> {
        if v1.len() != 2 || v2.len() != 2 {
            return Err(Error::DimensionMismatch(
                "subspace vectors must be two-dimensional".into(),
            ));
        }
        let signature = SpaceSignature::new(vec![Factor::boson("a", 4), Factor::qubit("b")])?;
        let mut left1 = ComplexVector::zeros(4);
        let mut left2 = ComplexVector::zeros(4);
        for k in 0..2 {
            left1[k] = v1[k];
            left2[k + 2] = v2[k];
        }
        let amps = kron_vec(&left1, &basis_vector(2, 0)) + kron_vec(&left2, &basis_vector(2, 1));
        let psi = StateVector::new(signature.clone(), amps)?.normalized()?;
        let basis = [(2, 0), (3, 0), (2, 1), (3, 1)]
            .iter()
            .map(|&(i, j)| embed(&ket_bra(4, i, j), "a", &signature))
            .collect::<Result<_>>()?;
        let b = embed(&ket_bra(2, 0, 1), "b", &signature)?;
        Ok(CorrelatedSubspace {
            signature,
            psi,
            basis,
            b,
        })
    }

    pub fn random<R: Rng>(rng: &mut R) -> Result<Self> {
        Self::new(&random_vector(rng, 2), &random_vector(rng, 2))
    }

    pub fn state(&self, s: f64) -> Result<State> {
        check_mixing(s)?;
        Ok(DensityMatrix::mixture(&[(s, self.psi.to_density()), (1.0 - s, white_noise(&self.signature))])?.into())
    }

    /// Witness matrix for `A = Σ z_j |α_{3,4}⟩⟨α_{1,2}|`, `B = |β₁⟩⟨β₂|`.
    pub fn matrix(&self, s: f64) -> Result<WitnessMatrix> {
        witness_matrix_expand_a(&self.state(s)?, &self.basis, &self.b)
    }

    /// `(2s² + s − 1)/8`
    pub fn closed_top(s: f64) -> f64 {
        (2.0 * s * s + s - 1.0) / 8.0
    }

    pub fn threshold(&self, tol: f64) -> Result<f64> {
        try_threshold_scan(|s| self.matrix(s)?.has_positive_eigenvalue(), 0.0, 1.0, tol)
    }
}

/// `ρ(s) = s|ψ₀₁⟩⟨ψ₀₁| + (1−s)/4 P₀₁⊗P₀₁` on two modes truncated at `dim`,
/// with `|ψ₀₁⟩ = (|0,1⟩ + |1,0⟩)/√2` and `P₀₁` the projector on `{|0⟩, |1⟩}`.
#[derive(Debug, Clone)]
pub struct Psi01Family {
    signature: SpaceSignature,
    psi: StateVector,
    noise: DensityMatrix,
}

/// Mixing weight at which the partial transpose of [`Psi01Family`] turns negative.
pub const PSI01_PPT_THRESHOLD: f64 = 1.0 / 3.0;

/// Threshold printed alongside the bilinear-form criterion for [`Psi01Family`].
pub const PSI01_QUOTED_THRESHOLD: f64 = 0.474;

impl Psi01Family {
    pub fn new(dim: usize) -> Result<Self> {
        let signature = SpaceSignature::new(vec![Factor::boson("a", dim), Factor::boson("b", dim)])?;
        let psi = superposition(&signature, &[(cr(1.0), &[0, 1]), (cr(1.0), &[1, 0])])?;
        let parts: Vec<(f64, DensityMatrix)> = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|lv| Ok((0.25, StateVector::basis(signature.clone(), lv)?.to_density())))
            .collect::<Result<_>>()?;
        let noise = DensityMatrix::mixture(&parts)?;
        Ok(Psi01Family { signature, psi, noise })
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn state(&self, s: f64) -> Result<State> {
        check_mixing(s)?;
        Ok(DensityMatrix::mixture(&[(s, self.psi.to_density()), (1.0 - s, self.noise.clone())])?.into())
    }

    /// Bilinear matrix `X` for `F = {Δa, Δa†}`, `G = {Δb, Δb†}`.
    pub fn x(&self, s: f64) -> Result<WitnessMatrix> {
        let state = self.state(s)?;
        let a = delta(&lowering(&self.signature, "a")?, &state)?;
        let b = delta(&lowering(&self.signature, "b")?, &state)?;
        let f = [a.clone(), a.adjoint()];
        let g = [b.clone(), b.adjoint()];
        bilinear_x(&state, &f, &g)
    }

    /// Plain `A = a`, `B = b` test; fires for `s > (√5 − 1)/2`.
    pub fn cond1(&self, s: f64) -> Result<WitnessReport> {
        cond1(
            &self.state(s)?,
            &lowering(&self.signature, "a")?,
            &lowering(&self.signature, "b")?,
        )
    }

    /// Best product-vector value `max (u⊗v)†X(u⊗v)` from the dense scan.
    pub fn scan_value(&self, s: f64) -> Result<f64> {
        Ok(product_vector_scan(&self.x(s)?)?.value)
    }

    /// Smallest `s` at which the scan finds a positive product value.
    pub fn scan_threshold(&self, tol: f64) -> Result<f64> {
        try_threshold_scan(
            |s| {
                let x = self.x(s)?;
                let value = product_vector_scan(&x)?.value;
                Ok(value > crate::linalg::POSITIVE_EPS * x.scale().max(1.0))
            },
            0.05,
            0.95,
            tol,
        )
    }
}

/// Trace of the `2×2` slice `X_v` at mode dimension 2: `(s² − 2)/4`.
pub fn psi01_slice_trace(s: f64) -> f64 {
    (s * s - 2.0) / 4.0
}

/// Determinant of the `2×2` slice `X_v` at mode dimension 2:
/// `(1/16)[1 − s³(|w₁|² − |w₂|²)² − 2s²(|w₁|⁴ + |w₂|⁴)]`.
pub fn psi01_slice_det(s: f64, w: &ComplexVector) -> f64 {
    let (p1, p2) = (w[0].norm_sqr(), w[1].norm_sqr());
    (1.0 - s.powi(3) * (p1 - p2).powi(2) - 2.0 * s * s * (p1 * p1 + p2 * p2)) / 16.0
}

/// Root of `s³ + 2s² = 1` in `(0, 1)`, where the slice determinant can first
/// turn negative: `(√5 − 1)/2`.
pub fn psi01_slice_threshold() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Which of the two Gaussian-invariance probe states to build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaussianProbe {
    /// `(|e,0⟩ + |g,1⟩)/√2`, atom `A = σ⁻`, field basis `{Δa, Δa†}`.
    AtomField,
    /// `S_a(z)(|0,1⟩ + |1,0⟩)/√2`, mode-a basis `{Δa†, Δa}`, `B = b`.
    SqueezedPair { z: C64 },
}

/// Witness evaluation of a probe state after a Gaussian unitary on its field mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPoint {
    pub params: GaussianParams,
    pub lambda_max: f64,
    pub positive: bool,
    pub dim: usize,
}

fn probe_state(probe: GaussianProbe, params: &GaussianParams, dim: usize) -> Result<(StateVector, f64)> {
    let (sig, field, base) = match probe {
        GaussianProbe::AtomField => {
            let sig = SpaceSignature::new(vec![Factor::qubit("atom"), Factor::boson("field", dim)])?;
            let psi = superposition(&sig, &[(cr(1.0), &[1, 0]), (cr(1.0), &[0, 1])])?;
            (sig, "field", psi)
        }
        GaussianProbe::SqueezedPair { z } => {
            let sig = SpaceSignature::new(vec![Factor::boson("a", dim), Factor::boson("b", 2)])?;
            let psi = superposition(&sig, &[(cr(1.0), &[0, 1]), (cr(1.0), &[1, 0])])?;
            let psi = psi.apply_local("a", &squeeze(z, dim)?)?;
            (sig, "a", psi)
        }
    };
    let out = base.apply_local(field, &params.unitary(dim)?)?;
    debug_assert_eq!(out.signature(), &sig);
    let leak = out.leakage(field)?;
    Ok((out, leak))
}

/// Build the probe at the smallest sufficient truncation (starting at 32).
pub fn gaussian_probe_state(probe: GaussianProbe, params: &GaussianParams) -> Result<(StateVector, usize)> {
    escalate(32, |dim| probe_state(probe, params, dim))
}

/// Witness matrix of a probe state in its expanded basis.
pub fn gaussian_probe_matrix(probe: GaussianProbe, psi: &StateVector) -> Result<WitnessMatrix> {
    let sig = psi.signature();
    let state: State = psi.clone().into();
    match probe {
        GaussianProbe::AtomField => {
            let a = delta(&lowering(sig, "field")?, &state)?;
            let sm = embed(&qubit_ops().sigma_minus, "atom", sig)?;
            witness_matrix_expand_b(&state, &sm, &[a.clone(), a.adjoint()])
        }
        GaussianProbe::SqueezedPair { .. } => {
            let a = delta(&lowering(sig, "a")?, &state)?;
            witness_matrix_expand_a(&state, &[a.adjoint(), a], &lowering(sig, "b")?)
        }
    }
}

pub fn gaussian_point(probe: GaussianProbe, params: GaussianParams) -> Result<GaussianPoint> {
    let (psi, dim) = gaussian_probe_state(probe, &params)?;
    let m = gaussian_probe_matrix(probe, &psi)?;
    Ok(GaussianPoint {
        params,
        lambda_max: m.lambda_max()?,
        positive: m.has_positive_eigenvalue()?,
        dim,
    })
}

/// 27 Gaussian transformations: `|α| ∈ {0, 0.75, 1.5}` (three phases),
/// `θ ∈ {0, 2π/3, 4π/3}`, `r ∈ {0, 0.4, 0.8}` (three squeezing phases).
pub fn gaussian_grid() -> Vec<GaussianParams> {
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(27);
    for (i, amp) in [0.0, 0.75, 1.5].into_iter().enumerate() {
        for (j, theta) in [0.0, tau / 3.0, 2.0 * tau / 3.0].into_iter().enumerate() {
            for (k, r) in [0.0, 0.4, 0.8].into_iter().enumerate() {
                let alpha = polar(amp, 0.7 * (i + j) as f64);
                let z = polar(r, 1.3 * (j + k) as f64);
                out.push(GaussianParams { alpha, theta, z });
            }
        }
    }
    out
}

/// Plain `A = a`, `B = b` test on `S_a(r)(|0,1⟩ + |1,0⟩)/√2`.
pub fn squeezed_pair_cond1(r: f64) -> Result<WitnessReport> {
    let probe = GaussianProbe::SqueezedPair { z: c(r, 0.0) };
    let (psi, _) = gaussian_probe_state(probe, &GaussianParams::identity())?;
    let sig = psi.signature().clone();
    cond1(&psi.into(), &lowering(&sig, "a")?, &lowering(&sig, "b")?)
}

/// `tanh r` at which [`squeezed_pair_cond1`] stops firing.
pub fn squeezed_pair_threshold(tol: f64) -> Result<f64> {
    try_threshold_scan(|x| Ok(squeezed_pair_cond1(x.atanh())?.entangled), 0.3, 0.9, tol)
}

/// Closed-form margin `(cosh²r − 2 sinh²r)/4`.
pub fn squeezed_pair_closed_margin(r: f64) -> f64 {
    (r.cosh().powi(2) - 2.0 * r.sinh().powi(2)) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::{ppt_min_eig, trial_rng, xv_slice};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn noisy_bell_margin_and_threshold() {
        let fam = NoisyBell::real(FRAC_1_SQRT_2).unwrap();
        for s in [0.0, 0.3, 0.618, 0.9, 1.0] {
            assert!((fam.report(s).unwrap().margin - fam.closed_margin(s)).abs() < 1e-14);
        }
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((fam.closed_threshold() - golden).abs() < 1e-14);
        assert!((fam.threshold(1e-6).unwrap() - golden).abs() < 1e-5);
        assert!(fam.state(1.2).is_err());
    }

    #[test]
    fn noisy_bell_general_overlap() {
        // |c₁c₂| = 0.3 gives x = 0.09 and s* = (√2.44 − 1)/0.72
        let c1 = ((1.0 + (1.0f64 - 4.0 * 0.09).sqrt()) / 2.0).sqrt();
        let fam = NoisyBell::real(c1).unwrap();
        assert!((fam.overlap() - 0.09).abs() < 1e-12);
        assert!((fam.closed_threshold() - 0.780_624_909_974).abs() < 1e-11);
        assert!((fam.threshold(1e-7).unwrap() - fam.closed_threshold()).abs() < 1e-6);
    }

    #[test]
    fn noisy_bell_fires_with_ppt() {
        let fam = NoisyBell::real(FRAC_1_SQRT_2).unwrap();
        let rho = fam.state(0.7).unwrap();
        assert!(fam.report(0.7).unwrap().entangled);
        assert!(ppt_min_eig(&rho.to_density(), &["a"]).unwrap() < -1e-10);
    }

    #[test]
    fn outside_support_always_fires() {
        for s in [1e-3, 0.1, 0.5, 1.0] {
            let (rho, a, b) = outside_support_state(s).unwrap();
            let r = cond1(&rho, &a, &b).unwrap();
            assert!(r.entangled, "s = {s}");
            assert!((r.margin - s * s / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn correlated_subspace_top_eigenvalue() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..5 {
            let fam = CorrelatedSubspace::random(&mut rng).unwrap();
            for s in [0.3, 0.5, 0.8] {
                let eig = fam.matrix(s).unwrap().eig().unwrap();
                assert!((eig.max() - CorrelatedSubspace::closed_top(s)).abs() < 1e-12);
                for &l in &eig.eigenvalues[..3] {
                    assert!((l + (1.0 - s) / 8.0).abs() < 1e-12);
                }
            }
        }
        let fam = CorrelatedSubspace::random(&mut rng).unwrap();
        assert!((fam.threshold(1e-6).unwrap() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn psi01_slice_matches_printed_equation_at_dim_two() {
        let fam = Psi01Family::new(2).unwrap();
        let mut rng = trial_rng(5, 1);
        for s in [0.2, 0.5, 0.9] {
            let x = fam.x(s).unwrap();
            for _ in 0..5 {
                let w = random_vector(&mut rng, 2);
                let xv = xv_slice(&x, &w).unwrap();
                assert!((xv.trace().re - psi01_slice_trace(s)).abs() < 1e-12);
                assert!((xv.determinant().re - psi01_slice_det(s, &w)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn psi01_thresholds() {
        let fam = Psi01Family::new(2).unwrap();
        let golden = psi01_slice_threshold();
        assert!((golden.powi(3) + 2.0 * golden.powi(2) - 1.0).abs() < 1e-14);
        assert!((fam.cond1(0.7).unwrap().margin - (0.49 - 0.3) / 4.0).abs() < 1e-14);
        let s = fam.scan_threshold(1e-3).unwrap();
        assert!((s - golden).abs() < 5e-3, "scan threshold {s}");
        assert!(fam.scan_value(PSI01_QUOTED_THRESHOLD + 0.05).unwrap() < 0.0);
    }

    #[test]
    fn psi01_ppt_boundary() {
        let fam = Psi01Family::new(2).unwrap();
        let below = ppt_min_eig(&fam.state(PSI01_PPT_THRESHOLD - 1e-3).unwrap().to_density(), &["a"]).unwrap();
        let above = ppt_min_eig(&fam.state(PSI01_PPT_THRESHOLD + 1e-3).unwrap().to_density(), &["a"]).unwrap();
        assert!(below > 0.0 && above < 0.0);
    }

    #[test]
    fn squeezed_pair_flip() {
        for r in [0.2, 0.6, 1.0] {
            let rep = squeezed_pair_cond1(r).unwrap();
            // truncation at the 1e-6 leakage limit leaves errors of a few 1e-9
            assert!((rep.margin - squeezed_pair_closed_margin(r)).abs() < 1e-7);
        }
        let x = squeezed_pair_threshold(1e-5).unwrap();
        assert!((x - FRAC_1_SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn gaussian_probes_stay_positive() {
        let grid = gaussian_grid();
        assert_eq!(grid.len(), 27);
        for params in [grid[0], grid[13], grid[26]] {
            for probe in [GaussianProbe::AtomField, GaussianProbe::SqueezedPair { z: c(0.5, 0.0) }] {
                let p = gaussian_point(probe, params).unwrap();
                assert!(p.positive && p.lambda_max > 0.0, "{probe:?} {params:?}");
            }
        }
    }
}
