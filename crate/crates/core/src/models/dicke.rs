//! `N` atoms split into groups of `k` and `N−k`, each group bosonized to lowest
//! order (`J⁻ ≈ √k ξ`), coupled to one field mode `a`:
//! `H = ω(a†a + ξ₁†ξ₁ + ξ₂†ξ₂) + κ[a†(√k ξ₁ + √(N−k) ξ₂) + h.c.]`.
//!
//! Starting from field ⊗ vacuum ⊗ vacuum, the two atomic groups become
//! entangled whenever the input field passes the tests in [`dicke_conditions`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{embed, evolve_passive, Factor, SpaceSignature, State, StateVector, LEAKAGE_LIMIT, MAX_FOCK_DIM};
use crate::linalg::{cr, ComplexMatrix, ComplexVector, C64};
use crate::optics::{annihilator, fock, number};
use crate::witness::{cond1, cond2, ppt_min_eig, witness_tolerance, WitnessReport};

use super::field::{FieldMoments, FieldSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeConfig {
    pub n_atoms: usize,
    pub k: usize,
    pub field: FieldSpec,
    pub omega: f64,
    pub kappa: f64,
    /// Evolution time in units of `1/Ω`, `Ω = κ√N`.
    pub omega_t: f64,
    /// Truncations of `(a, ξ₁, ξ₂)`; derived from the input field when absent.
    pub dims: Option<[usize; 3]>,
}

impl DickeConfig {
    /// `ω = 1`, `κ = 0.1`.
    pub fn new(n_atoms: usize, k: usize, field: FieldSpec, omega_t: f64) -> Self {
        DickeConfig {
            n_atoms,
            k,
            field,
            omega: 1.0,
            kappa: 0.1,
            omega_t,
            dims: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.k && self.k < self.n_atoms) {
            return Err(Error::InvalidParameter(format!(
                "need 1 ≤ k < N, got k = {}, N = {}",
                self.k, self.n_atoms
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite() && self.omega.is_finite() && self.omega_t.is_finite()) {
            return Err(Error::InvalidParameter("need κ > 0 and finite ω, Ωt".into()));
        }
        if let Some(d) = self.dims {
            if d.iter().any(|&x| x < 2) {
                return Err(Error::InvalidParameter(format!("mode dimensions {d:?} must be ≥ 2")));
            }
        }
        Ok(())
    }

    /// `Ω = κ√N`
    pub fn rabi(&self) -> f64 {
        self.kappa * (self.n_atoms as f64).sqrt()
    }

    /// `2(⟨n⟩ + 4√⟨n⟩ + 4)` for the field. Each atomic mode gets room for every
    /// photon number whose input probability tail exceeds `1e-14`, plus two levels.
    pub fn default_dims(&self) -> [usize; 3] {
        let da = self.field.suggested_dim();
        let dx = match self.field.vector(da) {
            Ok(v) => {
                let mut tail = 0.0;
                let mut d = v.len();
                while d > 0 && tail + v[d - 1].norm_sqr() <= 1e-14 {
                    tail += v[d - 1].norm_sqr();
                    d -= 1;
                }
                (d + 2).clamp(2, da)
            }
            Err(_) => da,
        };
        [da, dx, dx]
    }
}

/// Entanglement tests on the atomic groups expressed through input-field moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeConditions {
    pub moments: FieldMoments,
    /// `|⟨a²⟩|² − ⟨n⟩²`
    pub cond2_margin: f64,
    /// `⟨n⟩ − Δ²n`
    pub cond1_margin: f64,
    pub cond2_entangled: bool,
    pub cond1_entangled: bool,
}

pub fn dicke_conditions(field: &ComplexVector) -> DickeConditions {
    let m = FieldMoments::of(field);
    let cond2_margin = m.a2.norm_sqr() - m.n * m.n;
    let cond1_margin = m.n - m.variance();
    DickeConditions {
        moments: m,
        cond2_margin,
        cond1_margin,
        cond2_entangled: cond2_margin > witness_tolerance(m.n * m.n),
        cond1_entangled: cond1_margin > witness_tolerance(m.variance()),
    }
}

/// `⟨ξ₁ξ₂⟩, ⟨ξ₁†ξ₁⟩, ⟨ξ₂†ξ₂⟩, ⟨ξ₁†ξ₂⟩, ⟨ξ₁†ξ₁ξ₂†ξ₂⟩`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DickeMoments {
    pub xi1_xi2: C64,
    pub n1: f64,
    pub n2: f64,
    pub xi1d_xi2: C64,
    pub n1_n2: f64,
}

impl DickeMoments {
    pub fn max_abs_diff(&self, other: &DickeMoments) -> f64 {
        [
            (self.xi1_xi2 - other.xi1_xi2).norm(),
            (self.n1 - other.n1).abs(),
            (self.n2 - other.n2).abs(),
            (self.xi1d_xi2 - other.xi1d_xi2).norm(),
            (self.n1_n2 - other.n1_n2).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Heisenberg-picture moments at time `t = Ωt/Ω` from the input-field moments.
pub fn closed_moments(m: &FieldMoments, n_atoms: usize, k: usize, omega: f64, rabi: f64, omega_t: f64) -> DickeMoments {
    let (nf, kf) = (n_atoms as f64, k as f64);
    let t = omega_t / rabi;
    let s2 = omega_t.sin().powi(2);
    let mix = (kf * (nf - kf)).sqrt() / nf;
    DickeMoments {
        xi1_xi2: -C64::from_polar(1.0, -2.0 * omega * t) * m.a2 * (mix * s2),
        n1: kf / nf * s2 * m.n,
        n2: (nf - kf) / nf * s2 * m.n,
        xi1d_xi2: cr(mix * s2 * m.n),
        n1_n2: kf * (nf - kf) / (nf * nf) * s2 * s2 * m.pairs(),
    }
}

/// Single-excitation hopping matrix over `(a, ξ₁, ξ₂)`.
pub fn dicke_mode_matrix(n_atoms: usize, k: usize, omega: f64, kappa: f64) -> ComplexMatrix {
    let (g1, g2) = (kappa * (k as f64).sqrt(), kappa * ((n_atoms - k) as f64).sqrt());
    ComplexMatrix::from_row_slice(
        3,
        3,
        &[
            cr(omega),
            cr(g1),
            cr(g2),
            cr(g1),
            cr(omega),
            cr(0.0),
            cr(g2),
            cr(0.0),
            cr(omega),
        ],
    )
}

/// Rows give `b₀, b₁, b₂` in terms of `(a, ξ₁, ξ₂)`; frequencies `ω−Ω, ω, ω+Ω`.
pub fn normal_modes(n_atoms: usize, k: usize) -> ComplexMatrix {
    let (nf, kf) = (n_atoms as f64, k as f64);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = (kf / (2.0 * nf)).sqrt();
    let q = ((nf - kf) / (2.0 * nf)).sqrt();
    let row = |x: [f64; 3]| x.map(cr);
    let rows = [
        row([h, -p, -q]),
        row([0.0, ((nf - kf) / nf).sqrt(), -(kf / nf).sqrt()]),
        row([h, p, q]),
    ];
    ComplexMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

/// Rows give `a, ξ₁, ξ₂` in terms of `(b₀, b₁, b₂)`.
pub fn normal_modes_inverse(n_atoms: usize, k: usize) -> ComplexMatrix {
    let (nf, kf) = (n_atoms as f64, k as f64);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let p = (kf / (2.0 * nf)).sqrt();
    let q = ((nf - kf) / (2.0 * nf)).sqrt();
    let rows = [
        [h, 0.0, h],
        [-p, ((nf - kf) / nf).sqrt(), p],
        [-q, -(kf / nf).sqrt(), q],
    ];
    ComplexMatrix::from_fn(3, 3, |i, j| cr(rows[i][j]))
}

/// Three-mode simulation next to the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeOracle {
    pub simulated: DickeMoments,
    pub closed: DickeMoments,
    pub dims: [usize; 3],
    /// Largest top-two population over the three modes.
    pub leakage: f64,
    /// `(⟨ξ₁†ξ₁⟩ + ⟨ξ₂†ξ₂⟩)/N`, small when bosonization is trustworthy.
    pub hp_ratio: f64,
    /// Base tests on the `ξ₁ξ₂` marginal with `A = ξ₁`, `B = ξ₂`.
    pub cond1: WitnessReport,
    pub cond2: WitnessReport,
    pub ppt_min_eig: f64,
}

fn simulate(cfg: &DickeConfig, dims: [usize; 3]) -> Result<(DickeOracle, f64)> {
    let sig = SpaceSignature::new(vec![
        Factor::boson("a", dims[0]),
        Factor::boson("xi1", dims[1]),
        Factor::boson("xi2", dims[2]),
    ])?;
    let field = cfg.field.vector(dims[0])?;
    let psi0 = StateVector::product(sig, &[field.clone(), fock(0, dims[1])?, fock(0, dims[2])?])?;
    let hop = dicke_mode_matrix(cfg.n_atoms, cfg.k, cfg.omega, cfg.kappa);
    let rabi = cfg.rabi();
    let psi = evolve_passive(&psi0, &["a", "xi1", "xi2"], &hop, cfg.omega_t / rabi)?;
    let leakage = ["a", "xi1", "xi2"]
        .iter()
        .map(|m| psi.leakage(m))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let rho = psi.reduced(&["xi1", "xi2"])?;
    let msig = rho.signature().clone();
    let x1 = embed(&annihilator(dims[1])?, "xi1", &msig)?;
    let x2 = embed(&annihilator(dims[2])?, "xi2", &msig)?;
    let n1 = embed(&number(dims[1])?, "xi1", &msig)?;
    let n2 = embed(&number(dims[2])?, "xi2", &msig)?;
    let state: State = rho.clone().into();
    let simulated = DickeMoments {
        xi1_xi2: state.expectation(&(&x1 * &x2))?,
        n1: state.expectation(&n1)?.re,
        n2: state.expectation(&n2)?.re,
        xi1d_xi2: state.expectation(&(&x1.adjoint() * &x2))?,
        n1_n2: state.expectation(&(&n1 * &n2))?.re,
    };
    let closed = closed_moments(
        &FieldMoments::of(&field),
        cfg.n_atoms,
        cfg.k,
        cfg.omega,
        rabi,
        cfg.omega_t,
    );
    let oracle = DickeOracle {
        hp_ratio: (simulated.n1 + simulated.n2) / cfg.n_atoms as f64,
        cond1: cond1(&state, &x1, &x2)?,
        cond2: cond2(&state, &x1, &x2)?,
        ppt_min_eig: ppt_min_eig(&rho, &["xi1"])?,
        simulated,
        closed,
        dims,
        leakage,
    };
    Ok((oracle, leakage))
}

/// Escalation stops before the three-mode space exceeds this many levels.
pub const MAX_TOTAL_DIM: usize = 1 << 16;

/// Evolve field ⊗ |0⟩ ⊗ |0⟩ sector by sector and measure the atomic moments on
/// the `ξ₁ξ₂` marginal. All truncations double together on leakage, up to
/// [`MAX_TOTAL_DIM`] in total.
pub fn dicke_oracle(cfg: &DickeConfig) -> Result<DickeOracle> {
    cfg.validate()?;
    let mut dims = cfg.dims.unwrap_or_else(|| cfg.default_dims());
    loop {
        let leakage = match simulate(cfg, dims) {
            Ok((oracle, leak)) if leak < LEAKAGE_LIMIT => return Ok(oracle),
            Ok((_, leak)) => leak,
            Err(Error::Leakage { leakage, .. }) => leakage,
            Err(e) => return Err(e),
        };
        let next = dims.map(|d| (2 * d).min(MAX_FOCK_DIM));
        if dims[0] >= MAX_FOCK_DIM || next.iter().product::<usize>() > MAX_TOTAL_DIM {
            return Err(Error::Leakage {
                leakage,
                limit: LEAKAGE_LIMIT,
                dim: dims[0],
            });
        }
        dims = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, herm_eig, max_abs_diff};
    use std::f64::consts::PI;

    #[test]
    fn conditions_for_standard_inputs() {
        let coh = dicke_conditions(&FieldSpec::coherent(c(0.9, 0.4)).vector(40).unwrap());
        assert!(coh.cond1_margin.abs() < 1e-12 && coh.cond2_margin.abs() < 1e-12);
        assert!(!coh.cond1_entangled && !coh.cond2_entangled);

        let sq = dicke_conditions(&FieldSpec::squeezed(0.3).vector(40).unwrap());
        let r: f64 = 0.3;
        let expected = (r.cosh() * r.sinh()).powi(2) - r.sinh().powi(4);
        assert!((sq.cond2_margin - expected).abs() < 1e-12);
        assert!(sq.cond2_entangled);

        let f3 = dicke_conditions(&FieldSpec::Fock { n: 3 }.vector(8).unwrap());
        assert_eq!(f3.cond1_margin, 3.0);
        assert!(f3.cond1_entangled);
    }

    #[test]
    fn mode_matrix_spectrum_and_transform() {
        let (n, k, w, kap) = (7, 3, 1.0, 0.1);
        let m = dicke_mode_matrix(n, k, w, kap);
        let big = kap * (n as f64).sqrt();
        let eig = herm_eig(&m).unwrap();
        for (got, want) in eig.eigenvalues.iter().zip([w - big, w, w + big]) {
            assert!((got - want).abs() < 1e-12);
        }
        let t = normal_modes(n, k);
        let tinv = normal_modes_inverse(n, k);
        assert!(max_abs_diff(&(&tinv * &t), &ComplexMatrix::identity(3, 3)) < 1e-14);
        let diag = &t * &m * t.transpose();
        let want = crate::linalg::from_real_diagonal(&[w - big, w, w + big]);
        assert!(max_abs_diff(&diag, &want) < 1e-14);
    }

    #[test]
    fn vacuum_stays_empty() {
        let o = dicke_oracle(&DickeConfig::new(4, 2, FieldSpec::Vacuum, 1.0)).unwrap();
        assert!(
            o.simulated.max_abs_diff(&DickeMoments {
                xi1_xi2: cr(0.0),
                n1: 0.0,
                n2: 0.0,
                xi1d_xi2: cr(0.0),
                n1_n2: 0.0
            }) < 1e-14
        );
    }

    #[test]
    fn squeezed_input_matches_closed_form() {
        let mut cfg = DickeConfig::new(4, 2, FieldSpec::squeezed(0.3), PI / 3.0);
        cfg.dims = Some([32, 16, 16]);
        let o = dicke_oracle(&cfg).unwrap();
        assert!(o.simulated.max_abs_diff(&o.closed) < 1e-7, "{o:?}");
        let expected = 0.5 * (PI / 3.0).sin().powi(2) * 0.3f64.sinh().powi(2);
        assert!((o.simulated.n1 - expected).abs() < 1e-7);
        assert!(o.cond2.entangled && o.ppt_min_eig < -1e-10);
    }

    #[test]
    fn fock_and_coherent_inputs() {
        let o = dicke_oracle(&DickeConfig::new(5, 2, FieldSpec::Fock { n: 3 }, 1.1)).unwrap();
        assert!(o.simulated.max_abs_diff(&o.closed) < 1e-9);
        assert!(o.cond1.entangled && o.ppt_min_eig < -1e-10);
        let o = dicke_oracle(&DickeConfig::new(4, 1, FieldSpec::coherent(c(0.5, 0.2)), 0.8)).unwrap();
        assert!(o.simulated.max_abs_diff(&o.closed) < 1e-7);
        assert!(!o.cond1.entangled && !o.cond2.entangled);
        assert!(DickeConfig::new(4, 4, FieldSpec::Vacuum, 0.0).validate().is_err());
    }

    #[test]
    fn coherent_tail_fits_atomic_modes() {
        // the ξ marginal here is exactly rank deficient, which once broke the eigensolver
        let cfg = DickeConfig::new(4, 2, FieldSpec::coherent(c(0.6, -0.2)), 0.4);
        assert!(cfg.default_dims()[1] > cfg.default_dims()[0] / 2);
        let o = dicke_oracle(&cfg).unwrap();
        assert!(o.simulated.max_abs_diff(&o.closed) < 1e-12);
        assert!(o.ppt_min_eig > -1e-10 && !o.cond1.entangled);
    }
}
