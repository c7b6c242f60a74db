//! Labelled tensor-product spaces with states and operators on them.
//!
//! Factor order is fixed when a [`SpaceSignature`] is built and every layout
//! (embedding, partial trace, partial transpose) derives from it.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, herm_eig, partial_trace, strides, ComplexMatrix, ComplexVector, EigenDecomposition, C64, HERMITIAN_TOL,
    ONE, ZERO,
};

/// Population of the top levels above which a truncated mode is rejected.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

/// Largest bosonic truncation the escalation policy will try.
pub const MAX_FOCK_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// Bosonic mode truncated to its lowest `dim` Fock levels.
    Boson,
    /// Two-level system with basis `|g⟩ = 0`, `|e⟩ = 1`.
    Qubit,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factor {
    pub label: String,
    pub kind: FactorKind,
    pub dim: usize,
}

impl Factor {
    pub fn boson(label: impl Into<String>, dim: usize) -> Self {
        Factor {
            label: label.into(),
            kind: FactorKind::Boson,
            dim,
        }
    }

    pub fn qubit(label: impl Into<String>) -> Self {
        Factor {
            label: label.into(),
            kind: FactorKind::Qubit,
            dim: 2,
        }
    }
}

/// Ordered list of tensor factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceSignature {
    factors: Vec<Factor>,
}

impl SpaceSignature {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidSignature("no factors".into()));
        }
        let mut seen = BTreeSet::new();
        for f in &factors {
            if !seen.insert(f.label.as_str()) {
                return Err(Error::InvalidSignature(format!("duplicate label `{}`", f.label)));
            }
            if f.dim < 2 {
                return Err(Error::InvalidSignature(format!(
                    "factor `{}` has dimension {} < 2",
                    f.label, f.dim
                )));
            }
            if f.kind == FactorKind::Qubit && f.dim != 2 {
                return Err(Error::InvalidSignature(format!(
                    "qubit `{}` must have dimension 2",
                    f.label
                )));
            }
        }
        Ok(SpaceSignature { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownFactor(label.to_string()))
    }

    pub fn factor(&self, label: &str) -> Result<&Factor> {
        Ok(&self.factors[self.position(label)?])
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factor(label)?.dim)
    }

    pub fn labels(&self) -> Vec<String> {
        self.factors.iter().map(|f| f.label.clone()).collect()
    }

    /// Signature of the listed factors, kept in this signature's order.
    pub fn subset(&self, labels: &[&str]) -> Result<SpaceSignature> {
        let positions = self.positions(labels)?;
        SpaceSignature::new(positions.iter().map(|&p| self.factors[p].clone()).collect())
    }

    /// Sorted, de-duplicated positions of the given labels.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let set: BTreeSet<usize> = labels.iter().map(|l| self.position(l)).collect::<Result<_>>()?;
        Ok(set.into_iter().collect())
    }
}

/// Pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    signature: SpaceSignature,
    amplitudes: ComplexVector,
}

impl StateVector {
    pub fn new(signature: SpaceSignature, amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.len() != signature.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a space of dimension {}",
                amplitudes.len(),
                signature.total_dim()
            )));
        }
        Ok(StateVector { signature, amplitudes })
    }

    /// Tensor product of local vectors, one per factor in signature order.
    pub fn product(signature: SpaceSignature, locals: &[ComplexVector]) -> Result<Self> {
        if locals.len() != signature.factors().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} local vectors for {} factors",
                locals.len(),
                signature.factors().len()
            )));
        }
        for (v, f) in locals.iter().zip(signature.factors()) {
            if v.len() != f.dim {
                return Err(Error::DimensionMismatch(format!(
                    "local vector of length {} for factor `{}` of dimension {}",
                    v.len(),
                    f.label,
                    f.dim
                )));
            }
        }
        let amplitudes = locals[1..]
            .iter()
            .fold(locals[0].clone(), |acc, v| linalg::kron_vec(&acc, v));
        StateVector::new(signature, amplitudes)
    }

    /// Basis state with the given level on each factor, in signature order.
    pub fn basis(signature: SpaceSignature, levels: &[usize]) -> Result<Self> {
        let locals = signature
            .factors()
            .iter()
            .zip(levels)
            .map(|(f, &l)| {
                if l >= f.dim {
                    Err(Error::InvalidParameter(format!(
                        "level {l} outside factor `{}` of dimension {}",
                        f.label, f.dim
                    )))
                } else {
                    Ok(linalg::basis_vector(f.dim, l))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        StateVector::product(signature, &locals)
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> ComplexVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(StateVector {
            signature: self.signature.clone(),
            amplitudes: &self.amplitudes / cr(n),
        })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            signature: self.signature.clone(),
            matrix: linalg::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `O|ψ⟩` for an operator on the full space.
    pub fn apply(&self, op: &LabeledOperator) -> Result<StateVector> {
        if self.signature != op.signature {
            return Err(Error::SignatureMismatch);
        }
        Ok(StateVector {
            signature: self.signature.clone(),
            amplitudes: &op.matrix * &self.amplitudes,
        })
    }

    /// Apply a matrix acting on one factor without building the full operator.
    pub fn apply_local(&self, label: &str, local: &ComplexMatrix) -> Result<StateVector> {
        let pos = self.signature.position(label)?;
        let dims = self.signature.dims();
        let d = dims[pos];
        if local.nrows() != d || local.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "local operator is {}x{}, factor `{label}` has dimension {d}",
                local.nrows(),
                local.ncols()
            )));
        }
        let stride = strides(&dims)[pos];
        let block = d * stride;
        let n = self.amplitudes.len();
        let mut out = ComplexVector::zeros(n);
        for outer in (0..n).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for i in 0..d {
                    let mut acc = ZERO;
                    for j in 0..d {
                        let m = local[(i, j)];
                        if m != ZERO {
                            acc += m * self.amplitudes[base + j * stride];
                        }
                    }
                    out[base + i * stride] = acc;
                }
            }
        }
        Ok(StateVector {
            signature: self.signature.clone(),
            amplitudes: out,
        })
    }

    /// Reduced density matrix on the listed factors.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let positions = self.signature.positions(keep)?;
        let dims = self.signature.dims();
        let stride = strides(&dims);
        let offsets = |factors: &[usize]| -> Vec<usize> {
            let mut out = vec![0usize];
            for &f in factors {
                let (d, s) = (dims[f], stride[f]);
                out = out.iter().flat_map(|&b| (0..d).map(move |l| b + l * s)).collect();
            }
            out
        };
        let traced: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
        let kept_off = offsets(&positions);
        let traced_off = offsets(&traced);
        // Ψ[k, t] then ρ = Ψ Ψ†
        let psi = ComplexMatrix::from_fn(kept_off.len(), traced_off.len(), |k, t| {
            self.amplitudes[kept_off[k] + traced_off[t]]
        });
        let matrix = &psi * psi.adjoint();
        let labels: Vec<&str> = positions
            .iter()
            .map(|&p| self.signature.factors()[p].label.as_str())
            .collect();
        Ok(DensityMatrix {
            signature: self.signature.subset(&labels)?,
            matrix,
        })
    }

    /// Occupation distribution of one factor.
    pub fn populations(&self, label: &str) -> Result<Vec<f64>> {
        Ok(self.reduced(&[label])?.populations())
    }

    /// Population of the top two levels of a factor.
    pub fn leakage(&self, label: &str) -> Result<f64> {
        Ok(top_levels(&self.populations(label)?))
    }
}

fn top_levels(pops: &[f64]) -> f64 {
    pops.iter().rev().take(2).sum()
}

/// Mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    signature: SpaceSignature,
    matrix: ComplexMatrix,
}

/// Diagnostics of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl DensityReport {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect <= HERMITIAN_TOL && self.trace_defect <= 1e-8 && self.min_eigenvalue >= -1e-8
    }
}

/// Report Hermiticity, trace and positivity defects of a matrix.
pub fn validate_density(m: &ComplexMatrix) -> DensityReport {
    let hermiticity_defect = if m.is_square() {
        linalg::hermiticity_defect(m)
    } else {
        f64::INFINITY
    };
    let trace_defect = if m.is_square() {
        (m.trace() - ONE).norm()
    } else {
        f64::INFINITY
    };
    let min_eigenvalue = if m.is_square() {
        herm_eig(&linalg::hermitian_part(m))
            .map(|e| e.min())
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    DensityReport {
        hermiticity_defect,
        trace_defect,
        min_eigenvalue,
    }
}

impl DensityMatrix {
    /// Validated constructor.
    pub fn new(signature: SpaceSignature, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != signature.total_dim() || !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a space of dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                signature.total_dim()
            )));
        }
        let report = validate_density(&matrix);
        if !report.is_valid() {
            return Err(Error::InvalidParameter(format!("not a density matrix: {report:?}")));
        }
        Ok(DensityMatrix { signature, matrix })
    }

    /// Constructor that checks dimensions only.
    pub fn from_matrix_unchecked(signature: SpaceSignature, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), signature.total_dim());
        DensityMatrix { signature, matrix }
    }

    /// `Σ p_k ρ_k` over states on a common signature.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let sig = first.1.signature.clone();
        let mut m = ComplexMatrix::zeros(sig.total_dim(), sig.total_dim());
        for (p, rho) in parts {
            if rho.signature != sig {
                return Err(Error::SignatureMismatch);
            }
            m += &rho.matrix * cr(*p);
        }
        Ok(DensityMatrix {
            signature: sig,
            matrix: m,
        })
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn report(&self) -> DensityReport {
        validate_density(&self.matrix)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        let positions = self.signature.positions(keep)?;
        let matrix = partial_trace(&self.matrix, &self.signature.dims(), &positions)?;
        let labels: Vec<&str> = positions
            .iter()
            .map(|&p| self.signature.factors()[p].label.as_str())
            .collect();
        Ok(DensityMatrix {
            signature: self.signature.subset(&labels)?,
            matrix,
        })
    }

    pub fn leakage(&self, label: &str) -> Result<f64> {
        Ok(top_levels(&self.reduced(&[label])?.populations()))
    }
}

/// A pure or mixed state.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl From<StateVector> for State {
    fn from(v: StateVector) -> Self {
        State::Pure(v)
    }
}

impl From<DensityMatrix> for State {
    fn from(r: DensityMatrix) -> Self {
        State::Mixed(r)
    }
}

impl State {
    pub fn signature(&self) -> &SpaceSignature {
        match self {
            State::Pure(v) => v.signature(),
            State::Mixed(r) => r.signature(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(v) => v.to_density(),
            State::Mixed(r) => r.clone(),
        }
    }

    /// `⟨ψ|O|ψ⟩` or `Tr(ρ O)`.
    pub fn expectation(&self, op: &LabeledOperator) -> Result<C64> {
        if self.signature() != op.signature() {
            return Err(Error::SignatureMismatch);
        }
        Ok(self.expectation_matrix(op.matrix()))
    }

    fn expectation_matrix(&self, m: &ComplexMatrix) -> C64 {
        match self {
            State::Pure(v) => v.amplitudes.dotc(&(m * &v.amplitudes)),
            State::Mixed(r) => {
                let n = m.nrows();
                let mut acc = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        acc += r.matrix[(i, j)] * m[(j, i)];
                    }
                }
                acc
            }
        }
    }

    /// `U|ψ⟩` or `U ρ U†`.
    pub fn transform(&self, u: &LabeledOperator) -> Result<State> {
        if self.signature() != u.signature() {
            return Err(Error::SignatureMismatch);
        }
        Ok(self.transform_matrix(u.matrix()))
    }

    fn transform_matrix(&self, u: &ComplexMatrix) -> State {
        match self {
            State::Pure(v) => State::Pure(StateVector {
                signature: v.signature.clone(),
                amplitudes: u * &v.amplitudes,
            }),
            State::Mixed(r) => State::Mixed(DensityMatrix {
                signature: r.signature.clone(),
                matrix: u * &r.matrix * u.adjoint(),
            }),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            State::Pure(v) => v.amplitudes.norm_squared(),
            State::Mixed(r) => r.matrix.trace().re,
        }
    }

    pub fn leakage(&self, label: &str) -> Result<f64> {
        match self {
            State::Pure(v) => v.leakage(label),
            State::Mixed(r) => r.leakage(label),
        }
    }

    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        match self {
            State::Pure(v) => v.reduced(keep),
            State::Mixed(r) => r.reduced(keep),
        }
    }
}

/// Operator on a labelled space, remembering which factors it touches.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    signature: SpaceSignature,
    matrix: ComplexMatrix,
    support: BTreeSet<String>,
}

impl LabeledOperator {
    pub fn new(signature: SpaceSignature, matrix: ComplexMatrix, support: BTreeSet<String>) -> Result<Self> {
        let n = signature.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a space of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for l in &support {
            signature.position(l)?;
        }
        Ok(LabeledOperator {
            signature,
            matrix,
            support,
        })
    }

    pub fn identity(signature: &SpaceSignature) -> Self {
        let n = signature.total_dim();
        LabeledOperator {
            signature: signature.clone(),
            matrix: ComplexMatrix::identity(n, n),
            support: BTreeSet::new(),
        }
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn support(&self) -> &BTreeSet<String> {
        &self.support
    }

    pub fn adjoint(&self) -> Self {
        LabeledOperator {
            signature: self.signature.clone(),
            matrix: self.matrix.adjoint(),
            support: self.support.clone(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        LabeledOperator {
            signature: self.signature.clone(),
            matrix: &self.matrix * z,
            support: self.support.clone(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        linalg::is_hermitian(&self.matrix, HERMITIAN_TOL)
    }

    /// Factors touched by both operators.
    pub fn overlap(&self, other: &LabeledOperator) -> Vec<String> {
        self.support.intersection(&other.support).cloned().collect()
    }

    fn combine(&self, other: &LabeledOperator, matrix: ComplexMatrix) -> Self {
        assert_eq!(self.signature, other.signature, "operators live on different spaces");
        LabeledOperator {
            signature: self.signature.clone(),
            matrix,
            support: self.support.union(&other.support).cloned().collect(),
        }
    }

    /// Integer power; `pow(0)` is the identity.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = LabeledOperator::identity(&self.signature);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl Mul for &LabeledOperator {
    type Output = LabeledOperator;

    /// Panics if the operators live on different signatures.
    fn mul(self, rhs: &LabeledOperator) -> LabeledOperator {
        self.combine(rhs, &self.matrix * &rhs.matrix)
    }
}

impl Add for &LabeledOperator {
    type Output = LabeledOperator;

    fn add(self, rhs: &LabeledOperator) -> LabeledOperator {
        self.combine(rhs, &self.matrix + &rhs.matrix)
    }
}

impl Sub for &LabeledOperator {
    type Output = LabeledOperator;

    fn sub(self, rhs: &LabeledOperator) -> LabeledOperator {
        self.combine(rhs, &self.matrix - &rhs.matrix)
    }
}

/// Lift a matrix on one factor to the full space.
pub fn embed(local: &ComplexMatrix, label: &str, signature: &SpaceSignature) -> Result<LabeledOperator> {
    embed_multi(local, &[label], signature)
}

/// Lift a matrix acting on several factors (listed in signature order, the
/// local layout row-major over them) to the full space.
pub fn embed_multi(local: &ComplexMatrix, labels: &[&str], signature: &SpaceSignature) -> Result<LabeledOperator> {
    let positions: Vec<usize> = labels.iter().map(|l| signature.position(l)).collect::<Result<_>>()?;
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "embedded factors must be distinct and in signature order".into(),
        ));
    }
    let dims = signature.dims();
    let local_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
    let local_dim: usize = local_dims.iter().product();
    if local.nrows() != local_dim || local.ncols() != local_dim {
        return Err(Error::DimensionMismatch(format!(
            "local operator is {}x{}, factors {:?} span dimension {local_dim}",
            local.nrows(),
            local.ncols(),
            labels
        )));
    }
    let stride = strides(&dims);
    let local_stride = strides(&local_dims);
    let n = signature.total_dim();
    // full index = rest + Σ digit_k · stride[p_k]
    let local_offset: Vec<usize> = (0..local_dim)
        .map(|li| {
            positions
                .iter()
                .enumerate()
                .map(|(k, &p)| ((li / local_stride[k]) % local_dims[k]) * stride[p])
                .sum()
        })
        .collect();
    let mut matrix = ComplexMatrix::zeros(n, n);
    for rest in 0..n {
        if positions.iter().any(|&p| !(rest / stride[p]).is_multiple_of(dims[p])) {
            continue;
        }
        for (li, &oi) in local_offset.iter().enumerate() {
            for (lj, &oj) in local_offset.iter().enumerate() {
                let z = local[(li, lj)];
                if z != ZERO {
                    matrix[(rest + oi, rest + oj)] = z;
                }
            }
        }
    }
    Ok(LabeledOperator {
        signature: signature.clone(),
        matrix,
        support: labels.iter().map(|l| l.to_string()).collect(),
    })
}

/// Precomputed eigendecomposition of a Hamiltonian for repeated evolution.
#[derive(Debug, Clone)]
pub struct Propagator {
    signature: SpaceSignature,
    eig: EigenDecomposition,
}

impl Propagator {
    pub fn new(h: &LabeledOperator) -> Result<Self> {
        Ok(Propagator {
            signature: h.signature.clone(),
            eig: herm_eig(&h.matrix)?,
        })
    }

    /// `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> LabeledOperator {
        LabeledOperator {
            signature: self.signature.clone(),
            matrix: self.eig.propagator(t),
            support: self.signature.labels().into_iter().collect(),
        }
    }

    pub fn evolve(&self, t: f64, state: &State) -> Result<State> {
        if state.signature() != &self.signature {
            return Err(Error::SignatureMismatch);
        }
        Ok(state.transform_matrix(&self.eig.propagator(t)))
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.eig.eigenvalues
    }
}

/// `exp(-i H t)` applied to a state.
pub fn evolve(h: &LabeledOperator, t: f64, state: &State) -> Result<State> {
    Propagator::new(h)?.evolve(t, state)
}

/// Fixed-occupation blocks of a set of bosonic modes.
///
/// A Hamiltonian `Σ h_ij m_i† m_j` over truncated modes conserves the total
/// occupation, so its propagator is block diagonal over these sectors.
#[derive(Debug, Clone)]
struct Sectors {
    mode_dims: Vec<usize>,
    /// sector -> list of occupation tuples
    members: BTreeMap<usize, Vec<Vec<usize>>>,
}

impl Sectors {
    fn new(mode_dims: &[usize]) -> Self {
        let local_dim: usize = mode_dims.iter().product();
        let ls = strides(mode_dims);
        let mut members: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for li in 0..local_dim {
            let occ: Vec<usize> = (0..mode_dims.len()).map(|k| (li / ls[k]) % mode_dims[k]).collect();
            members.entry(occ.iter().sum()).or_default().push(occ);
        }
        Sectors {
            mode_dims: mode_dims.to_vec(),
            members,
        }
    }

    fn block_hamiltonian(&self, configs: &[Vec<usize>], hopping: &ComplexMatrix) -> ComplexMatrix {
        let index: BTreeMap<&Vec<usize>, usize> = configs.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let m = self.mode_dims.len();
        let mut block = ComplexMatrix::zeros(configs.len(), configs.len());
        for (col, occ) in configs.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    let h = hopping[(i, j)];
                    if h == ZERO {
                        continue;
                    }
                    if i == j {
                        block[(col, col)] += h * cr(occ[i] as f64);
                        continue;
                    }
                    if occ[j] == 0 || occ[i] + 1 >= self.mode_dims[i] {
                        continue;
                    }
                    let mut next = occ.clone();
                    next[j] -= 1;
                    next[i] += 1;
                    let amp = ((occ[j] * (occ[i] + 1)) as f64).sqrt();
                    block[(index[&next], col)] += h * cr(amp);
                }
            }
        }
        block
    }
}

fn check_passive(signature: &SpaceSignature, modes: &[&str], hopping: &ComplexMatrix) -> Result<Vec<usize>> {
    if hopping.nrows() != modes.len() || hopping.ncols() != modes.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} hopping matrix for {} modes",
            hopping.nrows(),
            hopping.ncols(),
            modes.len()
        )));
    }
    let defect = linalg::hermiticity_defect(hopping);
    if defect > HERMITIAN_TOL * linalg::norm(hopping).max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let positions: Vec<usize> = modes.iter().map(|m| signature.position(m)).collect::<Result<_>>()?;
    if positions.iter().collect::<BTreeSet<_>>().len() != positions.len() {
        return Err(Error::InvalidParameter("repeated mode label".into()));
    }
    for &p in &positions {
        if signature.factors()[p].kind != FactorKind::Boson {
            return Err(Error::InvalidParameter(format!(
                "factor `{}` is not bosonic",
                signature.factors()[p].label
            )));
        }
    }
    Ok(positions)
}

/// Per-sector propagators of `H = Σ_ij h_ij m_i† m_j` plus the layout needed
/// to apply them on a full signature.
struct PassiveEvolution {
    blocks: Vec<(Vec<usize>, ComplexMatrix)>,
    spectator_bases: Vec<usize>,
}

impl PassiveEvolution {
    /// With `support`, sectors where that vector vanishes are skipped
    /// (`apply` then leaves them at zero, which is exact for that vector).
    fn new(
        signature: &SpaceSignature,
        modes: &[&str],
        hopping: &ComplexMatrix,
        t: f64,
        support: Option<&ComplexVector>,
    ) -> Result<Self> {
        let positions = check_passive(signature, modes, hopping)?;
        let dims = signature.dims();
        let stride = strides(&dims);
        let mode_dims: Vec<usize> = positions.iter().map(|&p| dims[p]).collect();
        let sectors = Sectors::new(&mode_dims);
        let spectator_bases: Vec<usize> = (0..signature.total_dim())
            .filter(|&i| positions.iter().all(|&p| (i / stride[p]).is_multiple_of(dims[p])))
            .collect();
        let offset = |occ: &Vec<usize>| -> usize { occ.iter().zip(&positions).map(|(&n, &p)| n * stride[p]).sum() };
        let occupied = |configs: &&Vec<Vec<usize>>| match support {
            None => true,
            Some(v) => configs
                .iter()
                .any(|occ| spectator_bases.iter().any(|&b| v[b + offset(occ)] != ZERO)),
        };
        let blocks = sectors
            .members
            .values()
            .filter(occupied)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|configs| {
                let h = sectors.block_hamiltonian(configs, hopping);
                let u = herm_eig(&h)?.propagator(t);
                Ok((configs.iter().map(offset).collect(), u))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PassiveEvolution {
            blocks,
            spectator_bases,
        })
    }

    fn apply(&self, amps: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(amps.len());
        for &base in &self.spectator_bases {
            for (offsets, u) in &self.blocks {
                let local = ComplexVector::from_iterator(offsets.len(), offsets.iter().map(|&o| amps[base + o]));
                let moved = u * local;
                for (k, &o) in offsets.iter().enumerate() {
                    out[base + o] = moved[k];
                }
            }
        }
        out
    }
}

/// Evolve a pure state under a number-conserving quadratic Hamiltonian
/// `Σ_ij h_ij m_i† m_j` over the listed bosonic modes, sector by sector.
///
/// Equivalent to `exp(-iHt)` with `H` built from truncated ladder operators,
/// without ever forming the full matrix.
pub fn evolve_passive(state: &StateVector, modes: &[&str], hopping: &ComplexMatrix, t: f64) -> Result<StateVector> {
    let evo = PassiveEvolution::new(&state.signature, modes, hopping, t, Some(&state.amplitudes))?;
    Ok(StateVector {
        signature: state.signature.clone(),
        amplitudes: evo.apply(&state.amplitudes),
    })
}

/// Dense `exp(-i t Σ h_ij m_i† m_j)` on the full signature.
pub fn passive_unitary(
    signature: &SpaceSignature,
    modes: &[&str],
    hopping: &ComplexMatrix,
    t: f64,
) -> Result<LabeledOperator> {
    let evo = PassiveEvolution::new(signature, modes, hopping, t, None)?;
    let n = signature.total_dim();
    let mut matrix = ComplexMatrix::zeros(n, n);
    for &base in &evo.spectator_bases {
        for (offsets, u) in &evo.blocks {
            for (i, &oi) in offsets.iter().enumerate() {
                for (j, &oj) in offsets.iter().enumerate() {
                    matrix[(base + oi, base + oj)] = u[(i, j)];
                }
            }
        }
    }
    Ok(LabeledOperator {
        signature: signature.clone(),
        matrix,
        support: modes.iter().map(|m| m.to_string()).collect(),
    })
}

/// Run `attempt` at increasing truncations until the reported leakage drops
/// below [`LEAKAGE_LIMIT`]. The dimension doubles each time, up to
/// [`MAX_FOCK_DIM`].
pub fn escalate<T>(start: usize, mut attempt: impl FnMut(usize) -> Result<(T, f64)>) -> Result<(T, usize)> {
    let mut dim = start.max(2);
    loop {
        let outcome = attempt(dim);
        match outcome {
            Ok((value, leakage)) if leakage < LEAKAGE_LIMIT => return Ok((value, dim)),
            Ok((_, leakage)) | Err(Error::Leakage { leakage, .. }) => {
                if dim >= MAX_FOCK_DIM {
                    return Err(Error::Leakage {
                        leakage,
                        limit: LEAKAGE_LIMIT,
                        dim,
                    });
                }
            }
            Err(e) => return Err(e),
        }
        dim = (dim * 2).min(MAX_FOCK_DIM);
    }
}
