//! Single-mode input states shared by the Dicke and beam-splitter scenarios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{escalate, LEAKAGE_LIMIT};
use crate::linalg::{c, ComplexVector, C64, ZERO};
use crate::optics::{self, polar, vector_leakage};

/// A single-mode state description, resolved to amplitudes at a given truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Vacuum,
    Fock {
        n: usize,
    },
    Coherent {
        re: f64,
        im: f64,
    },
    /// `S(r e^{iφ})|0⟩`.
    Squeezed {
        r: f64,
        phi: f64,
    },
    /// Fock amplitudes `[re, im]`, normalised on construction.
    Custom {
        amplitudes: Vec<[f64; 2]>,
    },
}

impl FieldSpec {
    pub fn coherent(alpha: C64) -> Self {
        FieldSpec::Coherent {
            re: alpha.re,
            im: alpha.im,
        }
    }

    pub fn squeezed(r: f64) -> Self {
        FieldSpec::Squeezed { r, phi: 0.0 }
    }

    pub fn custom(amplitudes: &[C64]) -> Self {
        FieldSpec::Custom {
            amplitudes: amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// `√(1−c²)|0⟩ + c|2⟩` with `c = 1/√2 + ε`.
    pub fn epsilon_state(eps: f64) -> Result<Self> {
        let amp = std::f64::consts::FRAC_1_SQRT_2 + eps;
        if !(0.0..=1.0).contains(&amp) {
            return Err(Error::InvalidParameter(format!(
                "ε = {eps} leaves the |2⟩ amplitude outside [0, 1]"
            )));
        }
        Ok(Self::custom(&[c((1.0 - amp * amp).sqrt(), 0.0), ZERO, c(amp, 0.0)]))
    }

    /// Mean photon number of the untruncated state.
    pub fn mean_photons(&self) -> f64 {
        match self {
            FieldSpec::Vacuum => 0.0,
            FieldSpec::Fock { n } => *n as f64,
            FieldSpec::Coherent { re, im } => re * re + im * im,
            FieldSpec::Squeezed { r, .. } => r.sinh().powi(2),
            FieldSpec::Custom { amplitudes } => {
                let total: f64 = amplitudes.iter().map(|z| z[0] * z[0] + z[1] * z[1]).sum();
                amplitudes
                    .iter()
                    .enumerate()
                    .map(|(k, z)| k as f64 * (z[0] * z[0] + z[1] * z[1]))
                    .sum::<f64>()
                    / total
            }
        }
    }

    /// Truncation heuristic `2(⟨n⟩ + 4√⟨n⟩ + 4)`, never below what the
    /// description itself needs.
    pub fn suggested_dim(&self) -> usize {
        let n = self.mean_photons();
        let mut dim = (2.0 * (n + 4.0 * n.sqrt() + 4.0)).ceil() as usize;
        match self {
            FieldSpec::Fock { n } => dim = dim.max(n + 3),
            FieldSpec::Custom { amplitudes } => dim = dim.max(amplitudes.len() + 2),
            _ => {}
        }
        dim
    }

    /// Amplitudes at truncation `dim`, rejected on leakage.
    pub fn vector(&self, dim: usize) -> Result<ComplexVector> {
        match self {
            FieldSpec::Vacuum => optics::fock(0, dim),
            FieldSpec::Fock { n } => optics::fock(*n, dim),
            FieldSpec::Coherent { re, im } => optics::coherent(c(*re, *im), dim),
            FieldSpec::Squeezed { r, phi } => optics::squeezed_vacuum(polar(*r, *phi), dim),
            FieldSpec::Custom { amplitudes } => {
                if amplitudes.len() > dim {
                    return Err(Error::Leakage {
                        leakage: 1.0,
                        limit: LEAKAGE_LIMIT,
                        dim,
                    });
                }
                let mut v = ComplexVector::zeros(dim);
                for (k, z) in amplitudes.iter().enumerate() {
                    v[k] = c(z[0], z[1]);
                }
                let n = v.norm();
                if n == 0.0 || !n.is_finite() {
                    return Err(Error::ZeroVector);
                }
                v /= c(n, 0.0);
                let leakage = vector_leakage(&v);
                if leakage >= LEAKAGE_LIMIT {
                    return Err(Error::Leakage {
                        leakage,
                        limit: LEAKAGE_LIMIT,
                        dim,
                    });
                }
                Ok(v)
            }
        }
    }

    /// Amplitudes at the smallest doubling of `start` that passes the leakage check.
    pub fn resolve(&self, start: usize) -> Result<(ComplexVector, usize)> {
        escalate(start, |dim| {
            let v = self.vector(dim)?;
            let leak = vector_leakage(&v);
            Ok((v, leak))
        })
    }
}

/// Normally ordered moments of a single-mode pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMoments {
    /// `⟨n⟩`
    pub n: f64,
    /// `⟨n²⟩`
    pub n2: f64,
    /// `⟨a⟩`
    pub a: C64,
    /// `⟨a²⟩`
    pub a2: C64,
    /// `⟨n a²⟩`
    pub na2: C64,
}

impl FieldMoments {
    pub fn of(v: &ComplexVector) -> Self {
        let dim = v.len();
        let (mut n, mut n2, mut a, mut a2, mut na2) = (0.0, 0.0, ZERO, ZERO, ZERO);
        for k in 0..dim {
            let p = v[k].norm_sqr();
            let kf = k as f64;
            n += kf * p;
            n2 += kf * kf * p;
            if k + 1 < dim {
                a += v[k].conj() * v[k + 1] * (kf + 1.0).sqrt();
            }
            if k + 2 < dim {
                let amp = v[k].conj() * v[k + 2] * ((kf + 1.0) * (kf + 2.0)).sqrt();
                a2 += amp;
                na2 += amp * kf;
            }
        }
        FieldMoments { n, n2, a, a2, na2 }
    }

    /// `Δ²n = ⟨n²⟩ − ⟨n⟩²`
    pub fn variance(&self) -> f64 {
        self.n2 - self.n * self.n
    }

    /// `⟨a†²a²⟩ = ⟨n²⟩ − ⟨n⟩`
    pub fn pairs(&self) -> f64 {
        self.n2 - self.n
    }
}
