//! Bosonic and two-level operators, Gaussian unitaries and standard states.
//!
//! Conventions used everywhere in the crate:
//! - qubit basis `|g⟩ = 0`, `|e⟩ = 1`; `σ⁺ = |e⟩⟨g|`, `σ^z = [σ⁺, σ⁻] = diag(−1, 1)`
//! - `D(α) = exp(α a† − α* a)`, `R(θ) = exp(iθ a†a)`, `S(z) = exp((z* a² − z a†²)/2)`
//! - beam splitter `U = exp(θ(a†b − a b†))`, `t = cos θ`, `r = sin θ`, so that
//!   `U†aU = t a + r b` and `U†bU = −r a + t b`

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hilbert::{
    embed, passive_unitary, FactorKind, LabeledOperator, SpaceSignature, State, StateVector, LEAKAGE_LIMIT,
};
use crate::linalg::{self, c, cr, mat_exp, ComplexMatrix, ComplexVector, C64, I, ONE, ZERO};

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("mode dimension {dim} < 2")));
    }
    Ok(())
}

/// Truncated `a` with `a|n⟩ = √n |n−1⟩`.
pub fn annihilator(dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            cr((j as f64).sqrt())
        } else {
            ZERO
        }
    }))
}

pub fn creator(dim: usize) -> Result<ComplexMatrix> {
    Ok(annihilator(dim)?.adjoint())
}

pub fn number(dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(linalg::from_real_diagonal(
        &(0..dim).map(|n| n as f64).collect::<Vec<_>>(),
    ))
}

/// Population of the top two levels of a single-mode vector.
pub fn vector_leakage(v: &ComplexVector) -> f64 {
    v.iter().rev().take(2).map(|z| z.norm_sqr()).sum()
}

fn leak_check(leakage: f64, dim: usize) -> Result<()> {
    if leakage >= LEAKAGE_LIMIT || !leakage.is_finite() {
        return Err(Error::Leakage {
            leakage,
            limit: LEAKAGE_LIMIT,
            dim,
        });
    }
    Ok(())
}

/// `D(α)`, rejected if `D(α)|0⟩` reaches the top of the truncation.
pub fn displacement(alpha: C64, dim: usize) -> Result<ComplexMatrix> {
    let a = annihilator(dim)?;
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    let d = mat_exp(&gen)?;
    leak_check(vector_leakage(&d.column(0).into_owned()), dim)?;
    Ok(d)
}

/// `R(θ) = exp(iθ a†a)`.
pub fn rotation(theta: f64, dim: usize) -> Result<ComplexMatrix> {
    check_dim(dim)?;
    Ok(ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            (I * theta * i as f64).exp()
        } else {
            ZERO
        }
    }))
}

/// `S(z)`, rejected if `S(z)|0⟩` reaches the top of the truncation.
pub fn squeeze(z: C64, dim: usize) -> Result<ComplexMatrix> {
    let a = annihilator(dim)?;
    let a2 = &a * &a;
    let gen = (&a2 * z.conj() - a2.adjoint() * z) * cr(0.5);
    let s = mat_exp(&gen)?;
    leak_check(vector_leakage(&s.column(0).into_owned()), dim)?;
    Ok(s)
}

/// Parameters of the single-mode Gaussian unitary `D(α) R(θ) S(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub alpha: C64,
    pub theta: f64,
    pub z: C64,
}

impl GaussianParams {
    /// Validates `θ ∈ [0, 2π)`.
    pub fn new(alpha: C64, theta: f64, z: C64) -> Result<Self> {
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "rotation angle {theta} outside [0, 2π)"
            )));
        }
        if !(alpha.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GaussianParams { alpha, theta, z })
    }

    pub fn identity() -> Self {
        GaussianParams {
            alpha: ZERO,
            theta: 0.0,
            z: ZERO,
        }
    }

    /// Squeeze magnitude `r = |z|`.
    pub fn r(&self) -> f64 {
        self.z.norm()
    }

    pub fn unitary(&self, dim: usize) -> Result<ComplexMatrix> {
        Ok(displacement(self.alpha, dim)? * rotation(self.theta, dim)? * squeeze(self.z, dim)?)
    }
}

/// Single-qubit operators.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitOps {
    pub sigma_plus: ComplexMatrix,
    pub sigma_minus: ComplexMatrix,
    pub sigma_z: ComplexMatrix,
    pub p_e: ComplexMatrix,
}

pub fn qubit_ops() -> QubitOps {
    let sigma_minus = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let sigma_plus = sigma_minus.adjoint();
    QubitOps {
        sigma_z: &sigma_plus * &sigma_minus - &sigma_minus * &sigma_plus,
        p_e: &sigma_plus * &sigma_minus,
        sigma_plus,
        sigma_minus,
    }
}

/// Collective spin operators on `N` qubits (dimension `2^N`, first qubit most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSpin {
    pub n: usize,
    pub j_plus: ComplexMatrix,
    pub j_minus: ComplexMatrix,
    pub j_z: ComplexMatrix,
}

pub fn collective_spin(n: usize) -> Result<CollectiveSpin> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "collective spin needs at least one qubit".into(),
        ));
    }
    if n > 12 {
        return Err(Error::InvalidParameter(format!(
            "{n} qubits exceed the dense limit of 12"
        )));
    }
    let q = qubit_ops();
    let dim = 1usize << n;
    let mut j_minus = ComplexMatrix::zeros(dim, dim);
    for site in 0..n {
        let left = ComplexMatrix::identity(1 << site, 1 << site);
        let right = ComplexMatrix::identity(1 << (n - site - 1), 1 << (n - site - 1));
        j_minus += linalg::kron(&linalg::kron(&left, &q.sigma_minus), &right);
    }
    let j_plus = j_minus.adjoint();
    let j_z = (&j_plus * &j_minus - &j_minus * &j_plus) * cr(0.5);
    Ok(CollectiveSpin {
        n,
        j_plus,
        j_minus,
        j_z,
    })
}

/// `op − ⟨op⟩ I`, centred on the given state.
pub fn delta(op: &LabeledOperator, state: &State) -> Result<LabeledOperator> {
    let mean = state.expectation(op)?;
    let shift = LabeledOperator::identity(op.signature()).scale(mean);
    let mut out = op - &shift;
    // the identity shift does not widen the support
    out = LabeledOperator::new(out.signature().clone(), out.matrix().clone(), op.support().clone())?;
    Ok(out)
}

/// Annihilator of a bosonic factor, or `σ⁻` of a qubit factor, on the full space.
pub fn lowering(signature: &SpaceSignature, label: &str) -> Result<LabeledOperator> {
    let f = signature.factor(label)?;
    let local = match f.kind {
        FactorKind::Boson => annihilator(f.dim)?,
        FactorKind::Qubit => qubit_ops().sigma_minus,
    };
    embed(&local, label, signature)
}

/// Number operator of a bosonic factor, or `P_e` of a qubit factor, on the full space.
pub fn occupation(signature: &SpaceSignature, label: &str) -> Result<LabeledOperator> {
    let f = signature.factor(label)?;
    let local = match f.kind {
        FactorKind::Boson => number(f.dim)?,
        FactorKind::Qubit => qubit_ops().p_e,
    };
    embed(&local, label, signature)
}

pub fn fock(n: usize, dim: usize) -> Result<ComplexVector> {
    check_dim(dim)?;
    if n >= dim {
        return Err(Error::Leakage {
            leakage: 1.0,
            limit: LEAKAGE_LIMIT,
            dim,
        });
    }
    let v = linalg::basis_vector(dim, n);
    leak_check(vector_leakage(&v), dim)?;
    Ok(v)
}

/// Coherent state from its Poisson amplitudes, renormalised on the truncation.
pub fn coherent(alpha: C64, dim: usize) -> Result<ComplexVector> {
    check_dim(dim)?;
    let mut v = ComplexVector::zeros(dim);
    let mut amp = cr((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..dim {
        v[n] = amp;
        amp = amp * alpha / ((n + 1) as f64).sqrt();
    }
    let norm = v.norm();
    v /= cr(norm);
    leak_check(vector_leakage(&v), dim)?;
    Ok(v)
}

/// `S(z)|0⟩` via the matrix exponential.
pub fn squeezed_vacuum(z: C64, dim: usize) -> Result<ComplexVector> {
    Ok(squeeze(z, dim)?.column(0).into_owned())
}

/// Geometric weights `n̄ⁿ/(1+n̄)ⁿ⁺¹`, truncated and renormalised to unit trace.
pub fn thermal_weights(nbar: f64, dim: usize) -> Result<Vec<f64>> {
    check_dim(dim)?;
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mean photon number {nbar} must be ≥ 0"
        )));
    }
    let q = nbar / (1.0 + nbar);
    let mut w: Vec<f64> = (0..dim).map(|n| q.powi(n as i32) / (1.0 + nbar)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    leak_check(w.iter().rev().take(2).sum(), dim)?;
    Ok(w)
}

pub fn thermal(nbar: f64, dim: usize) -> Result<ComplexMatrix> {
    Ok(linalg::from_real_diagonal(&thermal_weights(nbar, dim)?))
}

/// Smallest truncation whose discarded thermal tail is below `tail`.
pub fn thermal_dim(nbar: f64, tail: f64) -> usize {
    let q = nbar / (1.0 + nbar);
    if q == 0.0 {
        return 2;
    }
    // discarded weight beyond dim is q^dim
    let dim = (tail.ln() / q.ln()).ceil() as usize;
    dim.max(2)
}

/// `exp(r(a†b† − ab))|0,0⟩` on `dim ⊗ dim` (mode `a` first).
///
/// Negative `r` gives the opposite phase branch, `Σ (−tanh r)ⁿ |n,n⟩ / cosh r`.
pub fn two_mode_squeezed(r: f64, dim: usize) -> Result<ComplexVector> {
    check_dim(dim)?;
    // a†b†|n,n⟩ = (n+1)|n+1,n+1⟩ keeps the {|n,n⟩} chain invariant
    let chain = ComplexMatrix::from_fn(dim, dim, |i, j| if i == j + 1 { cr(i as f64) } else { ZERO });
    let gen = (&chain - chain.adjoint()) * cr(r);
    let amps = mat_exp(&gen)?.column(0).into_owned();
    leak_check(vector_leakage(&amps), dim)?;
    let mut v = ComplexVector::zeros(dim * dim);
    for n in 0..dim {
        v[n * dim + n] = amps[n];
    }
    Ok(v)
}

fn beamsplitter_angle(t: f64, r: f64) -> Result<f64> {
    if t < 0.0 || r < 0.0 || ((t * t + r * r) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "beam splitter needs t, r ≥ 0 with t² + r² = 1, got t = {t}, r = {r}"
        )));
    }
    Ok(r.atan2(t))
}

/// Hopping matrix `h` with `θH = θ Σ h_ij m_i† m_j` generating the beam splitter
/// as `exp(−iθH)`.
pub fn beamsplitter_hopping() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[ZERO, I, -I, ZERO])
}

/// Beam splitter on the modes `(a, b)` of a signature.
pub fn beamsplitter_unitary(
    t: f64,
    r: f64,
    modes: (&str, &str),
    signature: &SpaceSignature,
) -> Result<LabeledOperator> {
    let theta = beamsplitter_angle(t, r)?;
    passive_unitary(signature, &[modes.0, modes.1], &beamsplitter_hopping(), theta)
}

/// Apply a beam splitter to a pure state without forming the full unitary.
pub fn apply_beamsplitter(state: &StateVector, t: f64, r: f64, modes: (&str, &str)) -> Result<StateVector> {
    let theta = beamsplitter_angle(t, r)?;
    crate::hilbert::evolve_passive(state, &[modes.0, modes.1], &beamsplitter_hopping(), theta)
}

/// Number of leading Fock levels `n` for which `U|n⟩` keeps its top-two
/// population below `limit`, i.e. the levels on which a truncated unitary can
/// be trusted.
pub fn low_leakage_levels(u: &ComplexMatrix, limit: f64) -> usize {
    (0..u.ncols())
        .take_while(|&n| vector_leakage(&u.column(n).into_owned()) < limit)
        .count()
}

/// `(|1,0⟩ − |0,1⟩)/√2`-style helper: normalised `Σ c_k |basis_k⟩` on a signature.
pub fn superposition(signature: &SpaceSignature, terms: &[(C64, &[usize])]) -> Result<StateVector> {
    let mut v = ComplexVector::zeros(signature.total_dim());
    for (amp, levels) in terms {
        v += StateVector::basis(signature.clone(), levels)?.into_amplitudes() * *amp;
    }
    StateVector::new(signature.clone(), v)?.normalized()
}

/// `r e^{iφ}`.
pub fn polar(r: f64, phi: f64) -> C64 {
    c(r * phi.cos(), r * phi.sin())
}
