//! Dense complex linear algebra.
//!
//! Matrices are [`nalgebra::DMatrix`] over [`Complex64`]. Everything here is a
//! pure function of its inputs. Tensor layouts are row-major over factors: the
//! first factor is the most significant digit of a basis index.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Relative tolerance on `max |H - H†|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// An eigenvalue is "positive" when it exceeds `POSITIVE_EPS * max(1, ‖M‖)`.
pub const POSITIVE_EPS: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Frobenius norm.
pub fn norm(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// `max_ij |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &ComplexMatrix, rel_tol: f64) -> bool {
    m.is_square() && hermiticity_defect(m) <= rel_tol * norm(m).max(1.0)
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * cr(0.5)
}

/// True when `λ` clears the positivity threshold relative to `scale`.
pub fn is_positive(lambda: f64, scale: f64) -> bool {
    lambda > POSITIVE_EPS * scale.max(1.0)
}

fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Spectrum of a Hermitian matrix, eigenvalues ascending, eigenvectors as
/// orthonormal columns in the same order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn top_vector(&self) -> ComplexVector {
        self.vector(self.dim() - 1)
    }

    /// Number of eigenvalues above the positivity threshold for a matrix of norm `scale`.
    pub fn positive_count(&self, scale: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| is_positive(l, scale)).count()
    }

    /// `V f(Λ) V†`.
    pub fn map<F: Fn(f64) -> C64>(&self, f: F) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fk = f(lambda);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= fk);
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(cr)
    }

    /// `exp(-i H t)` for the decomposed `H`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.map(|l| C64::from_polar(1.0, -l * t))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian to `HERMITIAN_TOL` relative to its norm; the
/// Hermitian part is what gets decomposed.
pub fn herm_eig(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    ensure_square(h)?;
    ensure_finite(h)?;
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL * norm(h).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    // nalgebra occasionally returns NaN on exactly rank-deficient input; a
    // diagonal shift moves the spectrum away from zero and avoids it.
    let base = hermitian_part(h);
    let scale = norm(&base).max(1.0);
    let (eig, shift) = [0.0, 0.5, -0.75, 1.25]
        .iter()
        .map(|&f| f * scale)
        .find_map(|shift| {
            let shifted = &base + ComplexMatrix::identity(n, n) * cr(shift);
            SymmetricEigen::try_new(shifted, f64::EPSILON, 0)
                .filter(|e| {
                    e.eigenvalues.iter().all(|x| x.is_finite())
                        && e.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
                })
                .map(|e| (e, shift))
        })
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k] - shift).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(h)?.max())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(h: &ComplexMatrix) -> Result<f64> {
    Ok(herm_eig(h)?.min())
}

const PADE_DEGREE: usize = 8;

/// Matrix exponential.
///
/// Hermitian and anti-Hermitian inputs go through the eigendecomposition,
/// which keeps `exp(-iHt)` unitary to rounding. Anything else uses scaling and
/// squaring with a diagonal Padé approximant.
pub fn mat_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(a.clone());
    }
    let scale = norm(a).max(1.0);
    if hermiticity_defect(a) <= 1e-13 * scale {
        return Ok(herm_eig(a)?.map(|l| cr(l.exp())));
    }
    let ia = a * I;
    if hermiticity_defect(&ia) <= 1e-13 * scale {
        // a = -i (i a), so exp(a) = exp(-i H) with H = i a
        return Ok(herm_eig(&ia)?.propagator(1.0));
    }
    pade_exp(a)
}

fn pade_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.nrows();
    let one_norm = (0..n)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if one_norm > 0.5 {
        (one_norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = a * cr(0.5f64.powi(squarings as i32));

    let q = PADE_DEGREE;
    let mut coeff = 1.0;
    let ident = ComplexMatrix::identity(n, n);
    let mut num = ident.clone();
    let mut den = ident.clone();
    let mut power = ident;
    for k in 1..=q {
        coeff *= (q - k + 1) as f64 / (k * (2 * q - k + 1)) as f64;
        power = &power * &x;
        num += &power * cr(coeff);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        den += &power * cr(sign * coeff);
    }
    let mut result = den.lu().solve(&num).ok_or(Error::Singular)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    ensure_finite(&result)?;
    Ok(result)
}

/// Kronecker product; the first argument is the slower index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    ensure_square(m)?;
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {:?} multiply to {}, matrix is {}x{}",
            dims,
            total,
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(total)
}

/// Row-major strides for a factor layout.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        out[k] = out[k + 1] * dims[k + 1];
    }
    out
}

/// Trace out every factor not listed in `keep`. The kept factors stay in
/// their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    let keep: BTreeSet<usize> = keep.iter().copied().collect();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let stride = strides(dims);
    let kept: Vec<usize> = keep.iter().copied().collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let offsets = |factors: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * dims[f]);
            for &base in &out {
                for level in 0..dims[f] {
                    next.push(base + level * stride[f]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);
    let dk = kept_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for &t in &traced_off {
        for (i, &ki) in kept_off.iter().enumerate() {
            for (j, &kj) in kept_off.iter().enumerate() {
                out[(i, j)] += m[(ki + t, kj + t)];
            }
        }
    }
    Ok(out)
}

/// Transpose the indices of one factor.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
    let n = check_dims(m, dims)?;
    if subsystem >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "factor index {subsystem} out of range for {} factors",
            dims.len()
        )));
    }
    let s = strides(dims)[subsystem];
    let d = dims[subsystem];
    let digit = |i: usize| (i / s) % d;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let (di, dj) = (digit(i), digit(j));
        m[(i - di * s + dj * s, j - dj * s + di * s)]
    }))
}

/// Schmidt decomposition `v = Σ κ_j |ξ_j⟩ ⊗ |ζ_j⟩`.
#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Non-negative, descending.
    pub coefficients: Vec<f64>,
    pub left: Vec<ComplexVector>,
    pub right: Vec<ComplexVector>,
}

impl Schmidt {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&k| k > tol).count()
    }

    pub fn reconstruct(&self) -> ComplexVector {
        let d1 = self.left[0].len();
        let d2 = self.right[0].len();
        let mut out = ComplexVector::zeros(d1 * d2);
        for ((k, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            out += kron_vec(l, r) * cr(*k);
        }
        out
    }
}

/// Schmidt decomposition of a vector on `d1 ⊗ d2` via the SVD of its
/// `d1 × d2` reshaping.
pub fn schmidt(v: &ComplexVector, d1: usize, d2: usize) -> Result<Schmidt> {
    if d1 * d2 != v.len() || d1 == 0 || d2 == 0 {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} is not {d1}x{d2}",
            v.len()
        )));
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mat = ComplexMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j]);
    let svd = SVD::try_new(mat, true, true, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let u = svd.u.ok_or(Error::NoConvergence)?;
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    let k = d1.min(d2);
    let mut order: Vec<usize> = (0..k).collect();
    // stable: ties keep first-occurrence order
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let coefficients = order.iter().map(|&j| svd.singular_values[j]).collect();
    let left = order.iter().map(|&j| u.column(j).into_owned()).collect();
    let right = order.iter().map(|&j| v_t.row(j).transpose().into_owned()).collect();
    Ok(Schmidt {
        coefficients,
        left,
        right,
    })
}

/// `‖A - B‖_max`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Outer product `|a⟩⟨b|`.
pub fn outer(a: &ComplexVector, b: &ComplexVector) -> ComplexMatrix {
    a * b.adjoint()
}

/// Standard basis vector.
pub fn basis_vector(dim: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[k] = ONE;
    v
}

pub fn from_real_diagonal(diag: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(diag.len(), diag.iter().map(|&x| cr(x))))
}
