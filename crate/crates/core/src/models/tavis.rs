//! Two atoms in a resonant cavity with `n` excitations, started in `|n,g,g⟩`.
//!
//! Basis order is field ⊗ atom1 ⊗ atom2, and the dynamics never leaves
//! `span{|n,g,g⟩, |n−1,e,g⟩, |n−1,g,e⟩, |n−2,e,e⟩}`.

use crate::error::{Error, Result};
use crate::hilbert::{embed, evolve, Factor, LabeledOperator, SpaceSignature, State, StateVector};
use crate::linalg::{cr, mat_exp, ComplexMatrix, ComplexVector, C64, I};
use crate::optics::{annihilator, delta, number, qubit_ops};
use crate::witness::{cond1, witness_matrix_expand_b};

/// Largest `n` for which the full-space oracle is run.
pub const FULL_SPACE_MAX_N: usize = 6;

/// Extra empty Fock levels kept above `n` so the truncation never touches the dynamics.
const FIELD_HEADROOM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct TcConfig {
    pub n: usize,
    pub omega: f64,
    pub kappa: f64,
    pub omega_t_grid: Vec<f64>,
}

impl TcConfig {
    /// `ω = 1`, `κ = 0.1`.
    pub fn new(n: usize, omega_t_grid: Vec<f64>) -> Self {
        TcConfig {
            n,
            omega: 1.0,
            kappa: 0.1,
            omega_t_grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        if !(self.kappa > 0.0 && self.kappa.is_finite() && self.omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need κ > 0 and finite ω, got κ = {}, ω = {}",
                self.kappa, self.omega
            )));
        }
        if self.omega_t_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    /// `Ω = κ√(2(2n−1))`
    pub fn rabi(&self) -> f64 {
        rabi(self.n, self.kappa)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("excitation number n must be ≥ 1".into()));
    }
    Ok(())
}

pub fn rabi(n: usize, kappa: f64) -> f64 {
    kappa * (2.0 * (2.0 * n as f64 - 1.0)).sqrt()
}

pub fn tc_signature(n: usize) -> Result<SpaceSignature> {
    check_n(n)?;
    SpaceSignature::new(vec![
        Factor::boson("field", n + FIELD_HEADROOM),
        Factor::qubit("atom1"),
        Factor::qubit("atom2"),
    ])
}

/// `H = ω a†a + (ω/2)(σ^z₁ + σ^z₂) + κ Σ_i (a σ_i⁺ + a† σ_i⁻)`.
pub fn tc_hamiltonian(sig: &SpaceSignature, omega: f64, kappa: f64) -> Result<LabeledOperator> {
    let dim = sig.dim_of("field")?;
    let q = qubit_ops();
    let a = embed(&annihilator(dim)?, "field", sig)?;
    let mut h = embed(&number(dim)?, "field", sig)?.scale(cr(omega));
    for atom in ["atom1", "atom2"] {
        let sz = embed(&q.sigma_z, atom, sig)?;
        let sp = embed(&q.sigma_plus, atom, sig)?;
        let hop = &a * &sp;
        h = &(&h + &sz.scale(cr(omega / 2.0))) + &(&hop + &hop.adjoint()).scale(cr(kappa));
    }
    Ok(h)
}

/// Levels `(photons, atom1, atom2)` of the `n`-excitation sector, in the order
/// `|n,g,g⟩, |n−1,e,g⟩, |n−1,g,e⟩, |n−2,e,e⟩` (the last one only for `n ≥ 2`).
pub fn sector_levels(n: usize) -> Vec<[usize; 3]> {
    let mut out = vec![[n, 0, 0], [n - 1, 1, 0], [n - 1, 0, 1]];
    if n >= 2 {
        out.push([n - 2, 1, 1]);
    }
    out
}

/// Hamiltonian restricted to [`sector_levels`]: diagonal `ω(n−1)`, couplings
/// `κ√n` into the single-excitation atom states and `κ√(n−1)` out of them.
pub fn sector_hamiltonian(n: usize, omega: f64, kappa: f64) -> Result<ComplexMatrix> {
    check_n(n)?;
    let d = sector_levels(n).len();
    let mut h = ComplexMatrix::identity(d, d) * cr(omega * (n as f64 - 1.0));
    let g1 = kappa * (n as f64).sqrt();
    for k in [1, 2] {
        h[(0, k)] = cr(g1);
        h[(k, 0)] = cr(g1);
        if n >= 2 {
            let g2 = kappa * (n as f64 - 1.0).sqrt();
            h[(3, k)] = cr(g2);
            h[(k, 3)] = cr(g2);
        }
    }
    Ok(h)
}

fn sector_to_full(n: usize, amps: &[C64]) -> Result<StateVector> {
    let sig = tc_signature(n)?;
    let mut v = ComplexVector::zeros(sig.total_dim());
    for (levels, amp) in sector_levels(n).iter().zip(amps) {
        v += StateVector::basis(sig.clone(), levels)?.into_amplitudes() * *amp;
    }
    StateVector::new(sig, v)
}

/// Closed-form evolved state from `|n,g,g⟩`, without the global phase `e^{−iω(n−1)t}`.
pub fn tc_closed_state(n: usize, omega_t: f64) -> Result<StateVector> {
    check_n(n)?;
    let nf = n as f64;
    let den = 2.0 * nf - 1.0;
    let (s, co) = omega_t.sin_cos();
    // cos x − 1 = −2 sin²(x/2) keeps small-angle amplitudes accurate
    let cm1 = -2.0 * (omega_t / 2.0).sin().powi(2);
    let side = -I * (nf / den).sqrt() * s * std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![cr((nf * co + nf - 1.0) / den), side, side];
    if n >= 2 {
        amps.push(cr((nf * (nf - 1.0)).sqrt() * cm1 / den));
    }
    sector_to_full(n, &amps)
}

/// Evolution inside the `n`-excitation sector, with the global phase removed.
pub fn tc_sector_state(n: usize, omega_t: f64, omega: f64, kappa: f64) -> Result<StateVector> {
    let h = sector_hamiltonian(n, omega, kappa)?;
    let t = omega_t / rabi(n, kappa);
    let d = h.nrows();
    let shifted = &h - ComplexMatrix::identity(d, d) * cr(omega * (n as f64 - 1.0));
    let u = mat_exp(&(shifted * (-I * t)))?;
    let amps: Vec<C64> = u.column(0).iter().copied().collect();
    sector_to_full(n, &amps)
}

/// Dense evolution of `|n,g,g⟩` on the whole truncated space, with the global phase removed.
pub fn tc_full_state(n: usize, omega_t: f64, omega: f64, kappa: f64) -> Result<StateVector> {
    let sig = tc_signature(n)?;
    let h = tc_hamiltonian(&sig, omega, kappa)?;
    let t = omega_t / rabi(n, kappa);
    let psi0: State = StateVector::basis(sig, &[n, 0, 0])?.into();
    match evolve(&h, t, &psi0)? {
        State::Pure(v) => {
            let phase = C64::from_polar(1.0, omega * (n as f64 - 1.0) * t);
            StateVector::new(v.signature().clone(), v.amplitudes() * phase)
        }
        State::Mixed(_) => unreachable!("pure states evolve to pure states"),
    }
}

/// Atom–field margin (closed form):
/// `(n/(2n−1)) sin²x [cos x + 2(n−1)]² − (n−1)[2(n−2)(cos x − 1)² + (2n−1) sin²x]`.
pub fn atom_field_margin(n: usize, omega_t: f64) -> f64 {
    let nf = n as f64;
    let (s, co) = omega_t.sin_cos();
    let s2 = s * s;
    let cm1 = -2.0 * (omega_t / 2.0).sin().powi(2);
    nf / (2.0 * nf - 1.0) * s2 * (co + 2.0 * (nf - 1.0)).powi(2)
        - (nf - 1.0) * (2.0 * (nf - 2.0) * cm1 * cm1 + (2.0 * nf - 1.0) * s2)
}

/// Field versus both atoms: as [`atom_field_margin`] with `(n−2)` in place of `2(n−2)`.
pub fn field_both_margin(n: usize, omega_t: f64) -> f64 {
    let nf = n as f64;
    let (s, co) = omega_t.sin_cos();
    let s2 = s * s;
    let cm1 = -2.0 * (omega_t / 2.0).sin().powi(2);
    nf / (2.0 * nf - 1.0) * s2 * (co + 2.0 * (nf - 1.0)).powi(2)
        - (nf - 1.0) * ((nf - 2.0) * cm1 * cm1 + (2.0 * nf - 1.0) * s2)
}

/// `M₁₁` of the matrix for `A = σ₁⁻` and the field basis `{Δa, Δa†}`,
/// scaled by `2(2n−1)²/n` to the normalisation of [`atom_field_margin`].
pub fn simulated_atom_field_margin(n: usize, psi: &StateVector) -> Result<f64> {
    let sig = psi.signature();
    let state: State = psi.clone().into();
    let a = delta(&embed(&annihilator(sig.dim_of("field")?)?, "field", sig)?, &state)?;
    let sm = embed(&qubit_ops().sigma_minus, "atom1", sig)?;
    let m = witness_matrix_expand_b(&state, &sm, &[a.clone(), a.adjoint()])?;
    let den = 2.0 * n as f64 - 1.0;
    Ok(m.matrix[(0, 0)].re * 2.0 * den * den / n as f64)
}

/// Margin of `|⟨a†J⁻⟩|² > ⟨a†a J⁺J⁻⟩`, scaled by `(2n−1)²/(2n)` to the
/// normalisation of [`field_both_margin`].
pub fn simulated_field_both_margin(n: usize, psi: &StateVector) -> Result<f64> {
    let sig = psi.signature();
    let a = embed(&annihilator(sig.dim_of("field")?)?, "field", sig)?;
    let sm = qubit_ops().sigma_minus;
    let j_minus = &embed(&sm, "atom1", sig)? + &embed(&sm, "atom2", sig)?;
    let report = cond1(&psi.clone().into(), &a, &j_minus)?;
    let den = 2.0 * n as f64 - 1.0;
    Ok(report.margin * den * den / (2.0 * n as f64))
}

/// `(2n−1)ε² − (3n² + n + 4)ε⁴/6`
pub fn series_atom(n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    (2.0 * nf - 1.0) * eps.powi(2) - (3.0 * nf * nf + nf + 4.0) * eps.powi(4) / 6.0
}

/// `(2n−1)ε² − (3n² + 11n + 2)ε⁴/12`
pub fn series_field(n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    (2.0 * nf - 1.0) * eps.powi(2) - (3.0 * nf * nf + 11.0 * nf + 2.0) * eps.powi(4) / 12.0
}

/// Sixth-order coefficient of [`atom_field_margin`]: `(30n³ + 77n² + 43n − 22)/(180(2n−1))`.
pub fn sixth_order_atom(n: usize) -> f64 {
    let nf = n as f64;
    (30.0 * nf.powi(3) + 77.0 * nf * nf + 43.0 * nf - 22.0) / (180.0 * (2.0 * nf - 1.0))
}

/// Sixth-order coefficient of [`field_both_margin`]: `(30n³ + 259n² − 19n − 14)/(360(2n−1))`.
pub fn sixth_order_field(n: usize) -> f64 {
    let nf = n as f64;
    (30.0 * nf.powi(3) + 259.0 * nf * nf - 19.0 * nf - 14.0) / (360.0 * (2.0 * nf - 1.0))
}

/// Exact margins next to their fourth-order series at `Ωt = ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonCheck {
    pub eps: f64,
    pub exact_atom: f64,
    pub series_atom: f64,
    pub exact_field: f64,
    pub series_field: f64,
}

impl EpsilonCheck {
    pub fn remainder_atom(&self) -> f64 {
        (self.exact_atom - self.series_atom).abs()
    }

    pub fn remainder_field(&self) -> f64 {
        (self.exact_field - self.series_field).abs()
    }
}

pub fn tc_epsilon_check(n: usize, eps: f64) -> Result<EpsilonCheck> {
    check_n(n)?;
    if !(eps > 0.0 && eps <= 0.05) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside (0, 0.05]")));
    }
    Ok(EpsilonCheck {
        eps,
        exact_atom: atom_field_margin(n, eps),
        series_atom: series_atom(n, eps),
        exact_field: field_both_margin(n, eps),
        series_field: series_field(n, eps),
    })
}

/// Observed convergence orders of the series remainders from the halving
/// sequence `ε ∈ {0.05, 0.025, 0.0125}`: `log₂(R(ε)/R(ε/2))`, two estimates each.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub checks: Vec<EpsilonCheck>,
    pub atom_orders: Vec<f64>,
    pub field_orders: Vec<f64>,
    /// `R(ε)/ε⁶` for each ε, atom then field.
    pub atom_ratios: Vec<f64>,
    pub field_ratios: Vec<f64>,
}

pub fn tc_epsilon_order(n: usize) -> Result<OrderEstimate> {
    let checks: Vec<EpsilonCheck> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|&e| tc_epsilon_check(n, e))
        .collect::<Result<_>>()?;
    let orders =
        |f: fn(&EpsilonCheck) -> f64| -> Vec<f64> { checks.windows(2).map(|w| (f(&w[0]) / f(&w[1])).log2()).collect() };
    let atom_orders = orders(EpsilonCheck::remainder_atom);
    let field_orders = orders(EpsilonCheck::remainder_field);
    let atom_ratios = checks.iter().map(|k| k.remainder_atom() / k.eps.powi(6)).collect();
    let field_ratios = checks.iter().map(|k| k.remainder_field() / k.eps.powi(6)).collect();
    Ok(OrderEstimate {
        checks,
        atom_orders,
        field_orders,
        atom_ratios,
        field_ratios,
    })
}

/// One grid point of a closed-form versus simulation comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcPoint {
    pub omega_t: f64,
    pub atom_field: f64,
    pub field_both: f64,
    pub sim_atom_field: f64,
    pub sim_field_both: f64,
    /// Largest deviation of the excitation number from `n`.
    pub excitation_drift: f64,
}

/// Closed-form margins next to margins computed on the sector-evolved state.
pub fn tc_trace(cfg: &TcConfig) -> Result<Vec<TcPoint>> {
    cfg.validate()?;
    let n = cfg.n;
    let sig = tc_signature(n)?;
    let excitations = &embed(&number(sig.dim_of("field")?)?, "field", &sig)?
        + &(&embed(&qubit_ops().p_e, "atom1", &sig)? + &embed(&qubit_ops().p_e, "atom2", &sig)?);
    cfg.omega_t_grid
        .iter()
        .map(|&x| {
            let psi = tc_sector_state(n, x, cfg.omega, cfg.kappa)?;
            let exc = State::from(psi.clone()).expectation(&excitations)?.re;
            Ok(TcPoint {
                omega_t: x,
                atom_field: atom_field_margin(n, x),
                field_both: field_both_margin(n, x),
                sim_atom_field: simulated_atom_field_margin(n, &psi)?,
                sim_field_both: simulated_field_both_margin(n, &psi)?,
                excitation_drift: (exc - n as f64).abs(),
            })
        })
        .collect()
}

/// `Ωt` in `(0, π)` where the `n = 2` atom–field margin changes sign:
/// `cos Ωt = 3/√2 − 2`.
pub fn n2_boundary() -> f64 {
    (3.0 * std::f64::consts::FRAC_1_SQRT_2 - 2.0).acos()
}
