//! Entanglement criteria: the two base inequalities, eigenvalue tests on
//! coefficient matrices, the bilinear form over product coefficient vectors,
//! local uncertainty relations and the partial-transpose oracle.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Factor, LabeledOperator, SpaceSignature, State, StateVector};
use crate::linalg::{
    self, c, cr, herm_eig, hermitian_part, is_positive, norm, partial_transpose, schmidt, ComplexMatrix, ComplexVector,
    EigenDecomposition, C64, HERMITIAN_TOL, ZERO,
};

/// Threshold below which a partial-transpose eigenvalue certifies entanglement.
pub const PPT_TOL: f64 = 1e-10;

/// Tolerance applied to a witness comparison with right-hand side `rhs`.
pub fn witness_tolerance(rhs: f64) -> f64 {
    1e-9 * rhs.abs().max(1.0)
}

/// Outcome of one inequality evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub entangled: bool,
    pub tolerance: f64,
}

impl WitnessReport {
    /// Report for "entangled if lhs > rhs".
    pub fn from_sides(lhs: f64, rhs: f64) -> Self {
        let tolerance = witness_tolerance(rhs);
        let margin = lhs - rhs;
        WitnessReport {
            lhs,
            rhs,
            margin,
            entangled: margin > tolerance,
            tolerance,
        }
    }
}

/// Hermitian coefficient matrix whose positive eigenvalue certifies entanglement.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessMatrix {
    pub matrix: ComplexMatrix,
    /// Labels of the expansion operators on side a (or the only side).
    pub basis: Vec<String>,
    /// Labels on side b for a bilinear form; empty otherwise.
    pub second_basis: Vec<String>,
}

impl WitnessMatrix {
    pub fn new(matrix: ComplexMatrix, basis: Vec<String>, second_basis: Vec<String>) -> Result<Self> {
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL * norm(&matrix).max(1.0) {
            return Err(Error::NotHermitian { defect });
        }
        Ok(WitnessMatrix {
            matrix: hermitian_part(&matrix),
            basis,
            second_basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `(n_F, n_G)` for a bilinear form.
    pub fn factor_dims(&self) -> Option<(usize, usize)> {
        if self.second_basis.is_empty() {
            None
        } else {
            Some((self.basis.len(), self.second_basis.len()))
        }
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        herm_eig(&self.matrix)
    }

    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.eig()?.max())
    }

    pub fn scale(&self) -> f64 {
        norm(&self.matrix)
    }

    pub fn has_positive_eigenvalue(&self) -> Result<bool> {
        Ok(is_positive(self.lambda_max()?, self.scale()))
    }

    /// `z† M z`.
    pub fn quadratic_form(&self, z: &ComplexVector) -> f64 {
        z.dotc(&(&self.matrix * z)).re
    }
}

fn check_disjoint(a: &LabeledOperator, b: &LabeledOperator) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    let overlap = a.overlap(b);
    if overlap.is_empty() {
        Ok(())
    } else {
        Err(Error::OverlappingSupport(overlap))
    }
}

/// `⟨X† Y⟩` on a state.
pub fn braket(state: &State, x: &LabeledOperator, y: &LabeledOperator) -> Result<C64> {
    if state.signature() != x.signature() || state.signature() != y.signature() {
        return Err(Error::SignatureMismatch);
    }
    Ok(match state {
        State::Pure(v) => {
            let xv = x.matrix() * v.amplitudes();
            let yv = y.matrix() * v.amplitudes();
            xv.dotc(&yv)
        }
        State::Mixed(r) => (y.matrix() * r.matrix() * x.matrix().adjoint()).trace(),
    })
}

/// First base test: entangled if `|⟨A†B⟩|² > ⟨A†A B†B⟩`.
pub fn cond1(state: &State, a: &LabeledOperator, b: &LabeledOperator) -> Result<WitnessReport> {
    check_disjoint(a, b)?;
    let lhs = braket(state, a, b)?.norm_sqr();
    let ab = a * b;
    let rhs = braket(state, &ab, &ab)?.re;
    Ok(WitnessReport::from_sides(lhs, rhs))
}

/// Second base test: entangled if `|⟨AB⟩|² > ⟨A†A⟩⟨B†B⟩`.
pub fn cond2(state: &State, a: &LabeledOperator, b: &LabeledOperator) -> Result<WitnessReport> {
    check_disjoint(a, b)?;
    let lhs = state.expectation(&(a * b))?.norm_sqr();
    let rhs = braket(state, a, a)?.re * braket(state, b, b)?.re;
    Ok(WitnessReport::from_sides(lhs, rhs))
}

fn labels(ops: &[LabeledOperator], prefix: &str) -> Vec<String> {
    (0..ops.len()).map(|j| format!("{prefix}{}", j + 1)).collect()
}

/// `M_jk = ⟨E_j†B⟩⟨E_k†B⟩* − ⟨E_j†E_k B†B⟩` for `A = Σ z_j E_j`.
pub fn witness_matrix_expand_a(state: &State, basis: &[LabeledOperator], b: &LabeledOperator) -> Result<WitnessMatrix> {
    witness_matrix_expand_a_named(state, basis, b, labels(basis, "E"))
}

pub fn witness_matrix_expand_a_named(
    state: &State,
    basis: &[LabeledOperator],
    b: &LabeledOperator,
    names: Vec<String>,
) -> Result<WitnessMatrix> {
    if basis.is_empty() {
        return Err(Error::InvalidParameter("empty operator basis".into()));
    }
    for e in basis {
        check_disjoint(e, b)?;
    }
    let d: Vec<C64> = basis.iter().map(|e| braket(state, e, b)).collect::<Result<_>>()?;
    let eb: Vec<LabeledOperator> = basis.iter().map(|e| e * b).collect();
    let n = basis.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let v = d[j] * d[k].conj() - braket(state, &eb[j], &eb[k])?;
            m[(j, k)] = v;
            m[(k, j)] = v.conj();
        }
    }
    WitnessMatrix::new(m, names, vec![])
}

/// `M_jk = ⟨A†F_j⟩*⟨A†F_k⟩ − ⟨A†A F_j†F_k⟩` for `B = Σ z_j F_j`.
pub fn witness_matrix_expand_b(state: &State, a: &LabeledOperator, basis: &[LabeledOperator]) -> Result<WitnessMatrix> {
    witness_matrix_expand_b_named(state, a, basis, labels(basis, "F"))
}

pub fn witness_matrix_expand_b_named(
    state: &State,
    a: &LabeledOperator,
    basis: &[LabeledOperator],
    names: Vec<String>,
) -> Result<WitnessMatrix> {
    if basis.is_empty() {
        return Err(Error::InvalidParameter("empty operator basis".into()));
    }
    for f in basis {
        check_disjoint(a, f)?;
    }
    let d: Vec<C64> = basis.iter().map(|f| braket(state, a, f)).collect::<Result<_>>()?;
    let af: Vec<LabeledOperator> = basis.iter().map(|f| a * f).collect();
    let n = basis.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let v = d[j].conj() * d[k] - braket(state, &af[j], &af[k])?;
            m[(j, k)] = v;
            m[(k, j)] = v.conj();
        }
    }
    WitnessMatrix::new(m, names, vec![])
}

/// Closed-form positivity test for a 2×2 Hermitian matrix: `λ_max > 0` iff the
/// trace is positive or the determinant negative.
pub fn eig2_positive(m: &ComplexMatrix) -> Result<bool> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected 2x2, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = linalg::hermiticity_defect(m);
    if defect > HERMITIAN_TOL * norm(m).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let tol = linalg::POSITIVE_EPS * norm(m).max(1.0);
    let (m11, m22) = (m[(0, 0)].re, m[(1, 1)].re);
    let off = m[(0, 1)].norm_sqr();
    Ok(m11 + m22 > tol || off - m11 * m22 > tol * norm(m).max(1.0))
}

/// Larger eigenvalue of a 2×2 Hermitian matrix.
pub fn eig2_max(m: &ComplexMatrix) -> f64 {
    let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
    let half = 0.5 * (a - d);
    0.5 * (a + d) + (half * half + m[(0, 1)].norm_sqr()).sqrt()
}

/// `X_{(j,m),(l,k)} = ⟨F_j†G_k⟩⟨F_l†G_m⟩* − ⟨F_j†F_l G_m†G_k⟩`, indexed `j·n_G + m`,
/// so that `(u⊗v)† X (u⊗v)` is the first-test margin of `A = Σ u_j F_j`, `B = Σ v_k G_k`.
pub fn bilinear_x(state: &State, f: &[LabeledOperator], g: &[LabeledOperator]) -> Result<WitnessMatrix> {
    if f.is_empty() || g.is_empty() {
        return Err(Error::InvalidParameter("empty operator basis".into()));
    }
    for fj in f {
        for gk in g {
            check_disjoint(fj, gk)?;
        }
    }
    let (nf, ng) = (f.len(), g.len());
    let mut cjk = vec![ZERO; nf * ng];
    let mut prods = Vec::with_capacity(nf * ng);
    for j in 0..nf {
        for k in 0..ng {
            cjk[j * ng + k] = braket(state, &f[j], &g[k])?;
            prods.push(&f[j] * &g[k]);
        }
    }
    let n = nf * ng;
    let mut x = ComplexMatrix::zeros(n, n);
    for row in 0..n {
        let (j, m) = (row / ng, row % ng);
        for col in row..n {
            let (l, k) = (col / ng, col % ng);
            let v = cjk[j * ng + k] * cjk[l * ng + m].conj() - braket(state, &prods[row], &prods[col])?;
            x[(row, col)] = v;
            x[(col, row)] = v.conj();
        }
    }
    WitnessMatrix::new(x, labels(f, "F"), labels(g, "G"))
}

fn require_dims(x: &WitnessMatrix) -> Result<(usize, usize)> {
    let dims = x
        .factor_dims()
        .ok_or_else(|| Error::InvalidParameter("matrix has no bipartite coefficient structure".into()))?;
    if dims.0 * dims.1 != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} coefficient space for a {}-dim matrix",
            dims.0,
            dims.1,
            x.dim()
        )));
    }
    Ok(dims)
}

/// Attach a `n_F ⊗ n_G` structure to a raw matrix.
pub fn bipartite(matrix: ComplexMatrix, nf: usize, ng: usize) -> Result<WitnessMatrix> {
    if nf * ng != matrix.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{nf}x{ng} coefficient space for a {}-dim matrix",
            matrix.nrows()
        )));
    }
    WitnessMatrix::new(
        matrix,
        (1..=nf).map(|j| format!("F{j}")).collect(),
        (1..=ng).map(|k| format!("G{k}")).collect(),
    )
}

/// `X_v = ⟨v|X|v⟩`, an operator on the side-a coefficient space.
pub fn xv_slice(x: &WitnessMatrix, v: &ComplexVector) -> Result<ComplexMatrix> {
    let (nf, ng) = require_dims(x)?;
    if v.len() != ng {
        return Err(Error::DimensionMismatch(format!(
            "v has length {}, expected {ng}",
            v.len()
        )));
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut out = ComplexMatrix::zeros(nf, nf);
    for j in 0..nf {
        for l in 0..nf {
            let mut acc = ZERO;
            for m in 0..ng {
                for k in 0..ng {
                    acc += v[m].conj() * x.matrix[(j * ng + m, l * ng + k)] * v[k];
                }
            }
            out[(j, l)] = acc;
        }
    }
    Ok(out)
}

/// `⟨u|X|u⟩`, an operator on the side-b coefficient space.
pub fn xu_slice(x: &WitnessMatrix, u: &ComplexVector) -> Result<ComplexMatrix> {
    let (nf, ng) = require_dims(x)?;
    if u.len() != nf {
        return Err(Error::DimensionMismatch(format!(
            "u has length {}, expected {nf}",
            u.len()
        )));
    }
    if u.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut out = ComplexMatrix::zeros(ng, ng);
    for m in 0..ng {
        for k in 0..ng {
            let mut acc = ZERO;
            for j in 0..nf {
                for l in 0..nf {
                    acc += u[j].conj() * x.matrix[(j * ng + m, l * ng + k)] * u[l];
                }
            }
            out[(m, k)] = acc;
        }
    }
    Ok(out)
}

/// Unit product vector `u ⊗ v` and its value `(u⊗v)† X (u⊗v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub u: ComplexVector,
    pub v: ComplexVector,
    pub value: f64,
}

impl ProductVector {
    fn evaluate(x: &WitnessMatrix, u: ComplexVector, v: ComplexVector) -> Self {
        let u = &u / cr(u.norm());
        let v = &v / cr(v.norm());
        let value = x.quadratic_form(&linalg::kron_vec(&u, &v));
        ProductVector { u, v, value }
    }

    pub fn tensor(&self) -> ComplexVector {
        linalg::kron_vec(&self.u, &self.v)
    }
}

/// Result of the reduced-matrix test.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOutcome {
    /// `Tr₂ X` has an eigenvalue above the positivity threshold.
    pub positive: bool,
    pub lambda_max: f64,
    /// When positive, a product vector with positive value.
    pub product: Option<ProductVector>,
}

/// Sufficient test: a positive eigenvalue of `Tr₂ X` guarantees a product
/// vector with `(u⊗v)†X(u⊗v) > 0`; one is located among `u_top ⊗ e_m`.
pub fn reduced_criterion(x: &WitnessMatrix) -> Result<ReducedOutcome> {
    let (nf, ng) = require_dims(x)?;
    let x1 = linalg::partial_trace(&x.matrix, &[nf, ng], &[0])?;
    let eig = herm_eig(&hermitian_part(&x1))?;
    let lambda_max = eig.max();
    let positive = is_positive(lambda_max, norm(&x1));
    let product = if positive {
        let u = eig.top_vector();
        let best = (0..ng)
            .map(|m| ProductVector::evaluate(x, u.clone(), linalg::basis_vector(ng, m)))
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .expect("non-empty side b");
        Some(best)
    } else {
        None
    };
    Ok(ReducedOutcome {
        positive,
        lambda_max,
        product,
    })
}

/// Product vector with positive value built from the top two eigenvectors of
/// `X` on a `2 ⊗ 2` coefficient space.
///
/// With `x₁ = Σ κ_j ξ_j ⊗ ζ_j` and `x₂ = Σ d_jk ξ_j ⊗ ζ_k`, the combination
/// `y x₁ + x₂` is a product vector when
/// `κ₁κ₂ y² + (κ₁ d₂₂ + κ₂ d₁₁) y + d₁₁ d₂₂ − d₁₂ d₂₁ = 0`, and its value is
/// `|y|² λ₁ + λ₂ > 0`. Degenerate cases fall back to [`product_vector_scan`].
pub fn product_from_two_positive(x: &WitnessMatrix) -> Result<ProductVector> {
    let (nf, ng) = require_dims(x)?;
    if (nf, ng) != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2x2 coefficient space, got {nf}x{ng}"
        )));
    }
    let eig = x.eig()?;
    if eig.positive_count(x.scale()) < 2 {
        return Err(Error::InvalidParameter("fewer than two positive eigenvalues".into()));
    }
    let x1 = eig.vector(3);
    let x2 = eig.vector(2);
    let sd = schmidt(&x1, 2, 2)?;
    let (k1, k2) = (sd.coefficients[0], sd.coefficients[1]);
    let tol = 1e-12;
    let candidate = if k2 <= tol {
        Some(x1.clone())
    } else {
        let d = |j: usize, k: usize| linalg::kron_vec(&sd.left[j], &sd.right[k]).dotc(&x2);
        let (qa, qb, qc) = (
            cr(k1 * k2),
            cr(k1) * d(1, 1) + cr(k2) * d(0, 0),
            d(0, 0) * d(1, 1) - d(0, 1) * d(1, 0),
        );
        let disc = (qb * qb - qa * qc * 4.0).sqrt();
        // numerically stable root pair
        let sgn = if (qb.conj() * disc).re >= 0.0 {
            cr(1.0)
        } else {
            cr(-1.0)
        };
        let q = (qb + sgn * disc) * -0.5;
        let roots = [if q.norm() > tol { qc / q } else { cr(f64::NAN) }, q / qa];
        roots
            .into_iter()
            .filter(|y| y.is_finite())
            .map(|y| &x1 * y + &x2)
            .find(|w| {
                schmidt(w, 2, 2)
                    .map(|s| s.coefficients[1] <= 1e-9 * s.coefficients[0])
                    .unwrap_or(false)
            })
    };
    if let Some(w) = candidate {
        let sd = schmidt(&w, 2, 2)?;
        let pv = ProductVector::evaluate(x, sd.left[0].clone(), sd.right[0].clone());
        if is_positive(pv.value, x.scale()) {
            return Ok(pv);
        }
    }
    let scan = product_vector_scan(x)?;
    if is_positive(scan.value, x.scale()) {
        Ok(scan)
    } else {
        Err(Error::SearchFailed("no positive product vector found".into()))
    }
}

/// Grid resolution per angle for [`product_vector_scan`].
pub const SCAN_GRID: usize = 180;

fn v_of(t: f64, phi: f64) -> ComplexVector {
    ComplexVector::from_vec(vec![cr(t.cos()), C64::from_polar(t.sin(), phi)])
}

fn slice_max(x: &WitnessMatrix, v: &ComplexVector) -> Result<(f64, ComplexMatrix)> {
    let xv = xv_slice(x, v)?;
    let lam = if xv.nrows() == 2 {
        eig2_max(&xv)
    } else {
        herm_eig(&hermitian_part(&xv))?.max()
    };
    Ok((lam, xv))
}

/// Maximise `λ_max(X_v)` over unit `v ∈ C²` parametrised as
/// `(cos t, e^{iφ} sin t)`: a 180×180 grid, then pattern search from the best cell.
pub fn product_vector_scan(x: &WitnessMatrix) -> Result<ProductVector> {
    let (_, ng) = require_dims(x)?;
    if ng != 2 {
        return Err(Error::DimensionMismatch(format!(
            "scan needs a two-dimensional side b, got {ng}"
        )));
    }
    let ht = FRAC_PI_2 / (SCAN_GRID - 1) as f64;
    let hp = TAU / SCAN_GRID as f64;
    let grid: Vec<(f64, f64, f64)> = (0..SCAN_GRID * SCAN_GRID)
        .into_par_iter()
        .map(|idx| {
            let (t, p) = ((idx / SCAN_GRID) as f64 * ht, (idx % SCAN_GRID) as f64 * hp);
            slice_max(x, &v_of(t, p)).map(|(l, _)| (l, t, p))
        })
        .collect::<Result<_>>()?;
    let (mut best, mut t, mut p) =
        grid.into_iter().fold(
            (f64::NEG_INFINITY, 0.0, 0.0),
            |acc, g| if g.0 > acc.0 { g } else { acc },
        );
    let (mut st, mut sp) = (ht, hp);
    while st > 1e-12 || sp > 1e-12 {
        let mut moved = false;
        for (dt, dp) in [(st, 0.0), (-st, 0.0), (0.0, sp), (0.0, -sp)] {
            let (nt, np) = (t + dt, p + dp);
            let (l, _) = slice_max(x, &v_of(nt, np))?;
            if l > best {
                best = l;
                t = nt;
                p = np;
                moved = true;
            }
        }
        if !moved {
            st *= 0.5;
            sp *= 0.5;
        }
    }
    let v = v_of(t, p);
    let (_, xv) = slice_max(x, &v)?;
    let u = herm_eig(&hermitian_part(&xv))?.top_vector();
    Ok(ProductVector::evaluate(x, u, v))
}

/// Local-uncertainty comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LurReport {
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub entangled: bool,
    pub tolerance: f64,
}

/// `Σ_j ⟨(A_j+B_j)†(A_j+B_j)⟩ − |⟨A_j+B_j⟩|²`, entangled when below the
/// caller-supplied separable bound.
pub fn lur_value(state: &State, pairs: &[(LabeledOperator, LabeledOperator)], bound: f64) -> Result<LurReport> {
    let mut value = 0.0;
    for (a, b) in pairs {
        check_disjoint(a, b)?;
        let d = a + b;
        value += braket(state, &d, &d)?.re - state.expectation(&d)?.norm_sqr();
    }
    let tolerance = witness_tolerance(bound);
    let margin = bound - value;
    Ok(LurReport {
        value,
        bound,
        margin,
        entangled: margin > tolerance,
        tolerance,
    })
}

/// Minimum eigenvalue of `ρ` partially transposed on the listed factors.
pub fn ppt_min_eig(rho: &DensityMatrix, side: &[&str]) -> Result<f64> {
    let report = rho.report();
    if !report.is_valid() {
        return Err(Error::InvalidParameter(format!("not a density matrix: {report:?}")));
    }
    let sig = rho.signature();
    let positions = sig.positions(side)?;
    if positions.is_empty() || positions.len() == sig.factors().len() {
        return Err(Error::InvalidParameter("cut must leave factors on both sides".into()));
    }
    let dims = sig.dims();
    let mut m = rho.matrix().clone();
    for p in positions {
        m = partial_transpose(&m, &dims, p)?;
    }
    Ok(herm_eig(&hermitian_part(&m))?.min())
}

/// Both base inequalities next to the partial-transpose verdict on the cut
/// defined by `A`'s support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptCrosscheck {
    pub cond1: WitnessReport,
    pub cond2: WitnessReport,
    pub ppt_min_eig: f64,
}

impl PptCrosscheck {
    pub fn flagged(&self) -> bool {
        self.cond1.entangled || self.cond2.entangled
    }

    pub fn ppt_entangled(&self) -> bool {
        self.ppt_min_eig < -PPT_TOL
    }

    /// A firing inequality implies a negative partial transpose.
    pub fn consistent(&self) -> bool {
        !self.flagged() || self.ppt_entangled()
    }
}

pub fn ppt_crosscheck(state: &State, a: &LabeledOperator, b: &LabeledOperator) -> Result<PptCrosscheck> {
    let cond1 = cond1(state, a, b)?;
    let cond2 = cond2(state, a, b)?;
    let side: Vec<&str> = a.support().iter().map(String::as_str).collect();
    let ppt_min_eig = ppt_min_eig(&state.to_density(), &side)?;
    Ok(PptCrosscheck {
        cond1,
        cond2,
        ppt_min_eig,
    })
}

/// Independent generator for trial `trial` of a run seeded by `master`.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

pub fn random_vector<R: Rng>(rng: &mut R, dim: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(dim, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / cr(n)
}

pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Strictly upper-triangular Gaussian matrix: a random lowering-type operator.
pub fn random_lowering<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let mut m = random_matrix(rng, dim);
    for i in 0..dim {
        for j in 0..=i {
            m[(i, j)] = ZERO;
        }
    }
    m
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let m = random_matrix(rng, dim);
    (&m + m.adjoint()) * cr(0.5)
}

/// Two-factor signature `a ⊗ b`.
pub fn bipartite_signature(da: usize, db: usize) -> Result<SpaceSignature> {
    SpaceSignature::new(vec![Factor::boson("a", da), Factor::boson("b", db)])
}

/// Convex mixture of `k` random product pure states with random weights.
pub fn random_separable<R: Rng>(rng: &mut R, sig: &SpaceSignature, k: usize) -> Result<DensityMatrix> {
    let dims = sig.dims();
    let mut weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let parts = weights
        .into_iter()
        .map(|w| {
            let locals: Vec<ComplexVector> = dims.iter().map(|&d| random_vector(rng, d)).collect();
            Ok((w, StateVector::product(sig.clone(), &locals)?.to_density()))
        })
        .collect::<Result<Vec<_>>>()?;
    DensityMatrix::mixture(&parts)
}

/// Summary of a seeded Monte Carlo check of the PPT implication and of
/// separability soundness.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub trials: usize,
    /// Pure-state trials where either inequality fired.
    pub flagged: usize,
    /// Pure-state trials that fired without a negative partial transpose.
    pub violations: usize,
    /// Separable mixtures on which any criterion fired.
    pub separable_flagged: usize,
    /// Smallest margin gap seen: `min(-ppt_min_eig)` over flagged trials.
    pub min_ppt_gap: f64,
}

impl MonteCarloSummary {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.separable_flagged == 0
    }
}

/// Per-trial outcome of [`monte_carlo_ppt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub dims: (usize, usize),
    pub check: PptCrosscheck,
    pub separable_flagged: bool,
}

/// One trial: a random pure state on `2⊗4` or `3⊗3` with random lowering-type
/// local operators, plus a separable mixture of up to 16 products with the same
/// operators (side dims alternate with the trial counter).
pub fn ppt_trial(master: u64, trial: u64) -> Result<TrialOutcome> {
    let mut rng = trial_rng(master, trial);
    let dims = if trial.is_multiple_of(2) { (2, 4) } else { (3, 3) };
    let sig = bipartite_signature(dims.0, dims.1)?;
    let a = crate::hilbert::embed(&random_lowering(&mut rng, dims.0), "a", &sig)?;
    let b = crate::hilbert::embed(&random_lowering(&mut rng, dims.1), "b", &sig)?;
    let psi: State = StateVector::new(sig.clone(), random_vector(&mut rng, dims.0 * dims.1))?.into();
    let check = ppt_crosscheck(&psi, &a, &b)?;
    let k = rng.random_range(1..=16);
    let mix: State = random_separable(&mut rng, &sig, k)?.into();
    let sep = ppt_crosscheck(&mix, &a, &b)?;
    Ok(TrialOutcome {
        trial,
        dims,
        check,
        separable_flagged: sep.flagged() || sep.ppt_entangled(),
    })
}

pub fn monte_carlo_ppt(master: u64, trials: usize) -> Result<(MonteCarloSummary, Vec<TrialOutcome>)> {
    let outcomes: Vec<TrialOutcome> = (0..trials as u64)
        .into_par_iter()
        .map(|t| ppt_trial(master, t))
        .collect::<Result<_>>()?;
    let mut summary = MonteCarloSummary {
        trials,
        flagged: 0,
        violations: 0,
        separable_flagged: 0,
        min_ppt_gap: f64::INFINITY,
    };
    for o in &outcomes {
        if o.check.flagged() {
            summary.flagged += 1;
            summary.min_ppt_gap = summary.min_ppt_gap.min(-o.check.ppt_min_eig);
            if !o.check.consistent() {
                summary.violations += 1;
            }
        }
        if o.separable_flagged {
            summary.separable_flagged += 1;
        }
    }
    Ok((summary, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::embed;
    use crate::linalg::{basis_vector, kron_vec, max_abs_diff, ONE};
    use crate::optics::annihilator;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two_qubits() -> SpaceSignature {
        bipartite_signature(2, 2).unwrap()
    }

    fn lowering_pair(sig: &SpaceSignature) -> (LabeledOperator, LabeledOperator) {
        let da = sig.dim_of("a").unwrap();
        let db = sig.dim_of("b").unwrap();
        (
            embed(&annihilator(da).unwrap(), "a", sig).unwrap(),
            embed(&annihilator(db).unwrap(), "b", sig).unwrap(),
        )
    }

    fn bell01(sig: &SpaceSignature) -> State {
        crate::optics::superposition(sig, &[(ONE, &[0, 1]), (ONE, &[1, 0])])
            .unwrap()
            .into()
    }

    #[test]
    fn report_verdict_follows_margin() {
        let r = WitnessReport::from_sides(0.25, 0.0);
        assert!(r.entangled && r.margin == 0.25 && r.tolerance == 1e-9);
        let r = WitnessReport::from_sides(1.0, 1.0);
        assert!(!r.entangled);
    }

    #[test]
    fn cond1_bell() {
        let sig = two_qubits();
        let (a, b) = lowering_pair(&sig);
        let r = cond1(&bell01(&sig), &a, &b).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-15 && r.rhs.abs() < 1e-15 && r.entangled);
    }

    #[test]
    fn overlapping_supports_rejected() {
        let sig = two_qubits();
        let (a, _) = lowering_pair(&sig);
        assert!(matches!(
            cond1(&bell01(&sig), &a, &a),
            Err(Error::OverlappingSupport(_))
        ));
        assert!(matches!(
            cond2(&bell01(&sig), &a, &a),
            Err(Error::OverlappingSupport(_))
        ));
    }

    #[test]
    fn cond2_vacuum_and_coherent() {
        let sig = bipartite_signature(30, 30).unwrap();
        let (a, b) = lowering_pair(&sig);
        let vac: State = StateVector::basis(sig.clone(), &[0, 0]).unwrap().into();
        assert!(!cond2(&vac, &a, &b).unwrap().entangled);
        let coh: State = StateVector::product(
            sig.clone(),
            &[
                crate::optics::coherent(c(0.7, 0.2), 30).unwrap(),
                crate::optics::coherent(cr(-0.5), 30).unwrap(),
            ],
        )
        .unwrap()
        .into();
        let r = cond2(&coh, &a, &b).unwrap();
        assert!(!r.entangled);
        assert!((r.lhs - 0.53 * 0.25).abs() < 1e-9);
    }

    #[test]
    fn expand_a_single_element_matches_cond1() {
        let sig = bipartite_signature(3, 3).unwrap();
        let mut rng = trial_rng(7, 0);
        let psi: State = StateVector::new(sig.clone(), random_vector(&mut rng, 9))
            .unwrap()
            .into();
        let a = embed(&random_matrix(&mut rng, 3), "a", &sig).unwrap();
        let b = embed(&random_matrix(&mut rng, 3), "b", &sig).unwrap();
        let m = witness_matrix_expand_a(&psi, std::slice::from_ref(&a), &b).unwrap();
        assert!((m.matrix[(0, 0)].re - cond1(&psi, &a, &b).unwrap().margin).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_identities() {
        let sig = bipartite_signature(3, 2).unwrap();
        let mut rng = trial_rng(11, 0);
        let rho: State = DensityMatrix::mixture(&[
            (
                0.6,
                StateVector::new(sig.clone(), random_vector(&mut rng, 6))
                    .unwrap()
                    .to_density(),
            ),
            (
                0.4,
                StateVector::new(sig.clone(), random_vector(&mut rng, 6))
                    .unwrap()
                    .to_density(),
            ),
        ])
        .unwrap()
        .into();
        let es: Vec<LabeledOperator> = (0..3)
            .map(|_| embed(&random_matrix(&mut rng, 3), "a", &sig).unwrap())
            .collect();
        let gs: Vec<LabeledOperator> = (0..2)
            .map(|_| embed(&random_matrix(&mut rng, 2), "b", &sig).unwrap())
            .collect();
        let combine = |ops: &[LabeledOperator], z: &ComplexVector| {
            ops.iter()
                .zip(z.iter())
                .fold(LabeledOperator::identity(&sig).scale(ZERO), |acc, (o, w)| {
                    &acc + &o.scale(*w)
                })
        };
        let ma = witness_matrix_expand_a(&rho, &es, &gs[0]).unwrap();
        let mb = witness_matrix_expand_b(&rho, &es[0], &gs).unwrap();
        let x = bilinear_x(&rho, &es, &gs).unwrap();
        for _ in 0..20 {
            let z = random_vector(&mut rng, 3);
            let w = random_vector(&mut rng, 2);
            let a = combine(&es, &z);
            let b = combine(&gs, &w);
            assert!((ma.quadratic_form(&z) - cond1(&rho, &a, &gs[0]).unwrap().margin).abs() < 1e-10);
            assert!((mb.quadratic_form(&w) - cond1(&rho, &es[0], &b).unwrap().margin).abs() < 1e-10);
            let margin = cond1(&rho, &a, &b).unwrap().margin;
            assert!((x.quadratic_form(&kron_vec(&z, &w)) - margin).abs() < 1e-9);
            let xv = xv_slice(&x, &w).unwrap();
            assert!((z.dotc(&(&xv * &z)).re - margin).abs() < 1e-10);
            let xu = xu_slice(&x, &z).unwrap();
            assert!((w.dotc(&(&xu * &w)).re - margin).abs() < 1e-10);
        }
    }

    #[test]
    fn eig2_cases() {
        let d = |a: f64, b: f64| linalg::from_real_diagonal(&[a, b]);
        assert!(eig2_positive(&d(-1.0, 0.5)).unwrap());
        assert!(!eig2_positive(&d(-1.0, -1.0)).unwrap());
        let m = ComplexMatrix::from_row_slice(2, 2, &[cr(-0.1), c(0.0, 0.2), c(0.0, -0.2), cr(-0.1)]);
        assert!(eig2_positive(&m).unwrap());
        assert!((eig2_max(&m) - 0.1).abs() < 1e-15);
        assert!(eig2_positive(&ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn xv_slice_cases() {
        let p = ComplexMatrix::from_row_slice(2, 2, &[cr(1.0), c(0.5, 0.1), c(0.5, -0.1), cr(-2.0)]);
        let q = ComplexMatrix::from_row_slice(2, 2, &[cr(0.3), c(0.0, 1.0), c(0.0, -1.0), cr(0.7)]);
        let x = bipartite(linalg::kron(&p, &q), 2, 2).unwrap();
        let v = ComplexVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let want = &p * v.dotc(&(&q * &v));
        assert!(max_abs_diff(&xv_slice(&x, &v).unwrap(), &want) < 1e-14);
        let block = xv_slice(&x, &basis_vector(2, 0)).unwrap();
        assert!(max_abs_diff(&block, &(&p * q[(0, 0)])) < 1e-15);
        assert!(matches!(xv_slice(&x, &ComplexVector::zeros(2)), Err(Error::ZeroVector)));
    }

    fn counterexample() -> WitnessMatrix {
        let s = FRAC_1_SQRT_2;
        let plus = ComplexVector::from_vec(vec![ZERO, cr(s), cr(s), ZERO]);
        let minus = ComplexVector::from_vec(vec![ZERO, cr(s), cr(-s), ZERO]);
        let m = linalg::outer(&plus, &plus) * cr(2.0) - linalg::outer(&minus, &minus) * cr(4.0);
        bipartite(m, 2, 2).unwrap()
    }

    #[test]
    fn counterexample_needs_product_search() {
        let x = counterexample();
        let x1 = linalg::partial_trace(&x.matrix, &[2, 2], &[0]).unwrap();
        assert!(max_abs_diff(&x1, &(ComplexMatrix::identity(2, 2) * cr(-1.0))) < 1e-14);
        assert!(!reduced_criterion(&x).unwrap().positive);
        let plus_x = ComplexVector::from_vec(vec![cr(FRAC_1_SQRT_2), cr(FRAC_1_SQRT_2)]);
        assert!(x.quadratic_form(&kron_vec(&plus_x, &plus_x)) > 0.0);
        let xv = xv_slice(&x, &plus_x).unwrap();
        assert!(plus_x.dotc(&(&xv * &plus_x)).re > 0.0);
        let scan = product_vector_scan(&x).unwrap();
        assert!(scan.value > 0.4);
    }

    #[test]
    fn reduced_criterion_cases() {
        let x = bipartite(linalg::from_real_diagonal(&[-0.1, -0.1, 3.0, -0.1]), 2, 2).unwrap();
        let out = reduced_criterion(&x).unwrap();
        assert!(out.positive);
        assert!(out.product.unwrap().value > 0.0);
        // Tr₂ X = diag(1, −3)
        let x = bipartite(linalg::from_real_diagonal(&[2.0, -1.0, -1.0, -2.0]), 2, 2).unwrap();
        let out = reduced_criterion(&x).unwrap();
        assert!(out.positive && (out.lambda_max - 1.0).abs() < 1e-14);
        assert!(out.product.unwrap().value > 0.0);
    }

    #[test]
    fn two_positive_cases() {
        let id = bipartite(ComplexMatrix::identity(4, 4), 2, 2).unwrap();
        assert!((product_from_two_positive(&id).unwrap().value - 1.0).abs() < 1e-12);
        let s = FRAC_1_SQRT_2;
        let e00 = basis_vector(4, 0);
        let sym = ComplexVector::from_vec(vec![ZERO, cr(s), cr(s), ZERO]);
        let x = bipartite(linalg::outer(&e00, &e00) + linalg::outer(&sym, &sym), 2, 2).unwrap();
        let pv = product_from_two_positive(&x).unwrap();
        assert!(pv.value > 0.0);
        assert!((x.quadratic_form(&pv.tensor()) - pv.value).abs() < 1e-14);
        let one = bipartite(linalg::from_real_diagonal(&[1.0, -1.0, -1.0, -1.0]), 2, 2).unwrap();
        assert!(product_from_two_positive(&one).is_err());
    }

    #[test]
    fn two_positive_random_always_succeeds() {
        let mut successes = 0;
        let mut trial = 0;
        while successes < 100 {
            let mut rng = trial_rng(2024, trial);
            trial += 1;
            let x = bipartite(random_hermitian(&mut rng, 4), 2, 2).unwrap();
            if x.eig().unwrap().positive_count(x.scale()) < 2 {
                continue;
            }
            let pv = product_from_two_positive(&x).unwrap();
            assert!(pv.value > 0.0, "trial {trial}");
            successes += 1;
        }
    }

    #[test]
    fn lur_cases() {
        let sig = bipartite_signature(20, 20).unwrap();
        let (a, b) = lowering_pair(&sig);
        let vac: State = StateVector::basis(sig.clone(), &[0, 0]).unwrap().into();
        let r = lur_value(&vac, &[(a.clone(), b.adjoint())], 1.0).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14 && !r.entangled);
        assert!(matches!(
            lur_value(&vac, &[(a.clone(), a.adjoint())], 1.0),
            Err(Error::OverlappingSupport(_))
        ));
    }

    #[test]
    fn ppt_cases() {
        let sig = two_qubits();
        let bell = bell01(&sig).to_density();
        assert!((ppt_min_eig(&bell, &["a"]).unwrap() + 0.5).abs() < 1e-12);
        assert!((ppt_min_eig(&bell, &["b"]).unwrap() + 0.5).abs() < 1e-12);
        let mut rng = trial_rng(5, 0);
        let prod = StateVector::product(sig.clone(), &[random_vector(&mut rng, 2), random_vector(&mut rng, 2)])
            .unwrap()
            .to_density();
        assert!(ppt_min_eig(&prod, &["a"]).unwrap() >= -1e-10);
        assert!(ppt_min_eig(&prod, &[]).is_err());
        let bad = DensityMatrix::from_matrix_unchecked(sig, ComplexMatrix::identity(4, 4));
        assert!(ppt_min_eig(&bad, &["a"]).is_err());
    }

    #[test]
    fn ppt_multi_factor_cut() {
        let sig = SpaceSignature::new(vec![Factor::qubit("q1"), Factor::qubit("q2"), Factor::boson("f", 3)]).unwrap();
        // q1 entangled with f, q2 in a product state
        let psi = crate::optics::superposition(&sig, &[(ONE, &[1, 0, 0]), (ONE, &[0, 0, 1])]).unwrap();
        let rho = psi.to_density();
        assert!((ppt_min_eig(&rho, &["q1", "q2"]).unwrap() + 0.5).abs() < 1e-12);
        assert!(ppt_min_eig(&rho, &["q2"]).unwrap() > -1e-12);
    }

    #[test]
    fn monte_carlo_small_run_is_deterministic() {
        let (s1, o1) = monte_carlo_ppt(3, 20).unwrap();
        let (s2, o2) = monte_carlo_ppt(3, 20).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(o1, o2);
        assert!(s1.passed());
    }
}
