use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use entcrit::models::beamsplitter::{bs_conditions, bs_simulate, BsConfig};
use entcrit::models::dicke::{dicke_conditions, dicke_oracle, DickeConfig};
use entcrit::models::families::{
    gaussian_grid, gaussian_point, squeezed_pair_closed_margin, squeezed_pair_cond1, squeezed_pair_threshold,
    CorrelatedSubspace, GaussianProbe, NoisyBell, Psi01Family, PSI01_PPT_THRESHOLD, PSI01_QUOTED_THRESHOLD,
};
use entcrit::models::jc::{jc_witness_trace, AtomInit, JcConfig};
use entcrit::models::lur::{
    atom_field_phase_scan, atom_field_window, two_mode_squeezed_closed, two_mode_squeezed_lur, SqueezeBranch,
};
use entcrit::models::tavis::{atom_field_margin, field_both_margin, n2_boundary, tc_epsilon_order, tc_trace, TcConfig};
use entcrit::models::FieldSpec;
use entcrit::witness::{monte_carlo_ppt, trial_rng};
use entcrit::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cli::{Branch, Family, LurInstance, ProbeChoice};
use crate::config::{CliError, Experiment};
use crate::output::{Cell, Report, Table};

/// `n` evenly spaced points on `[lo, hi]`.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn positive(name: &str, x: f64) -> Result<(), String> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} = {x} must be positive and finite"))
    }
}

fn finite(name: &str, x: f64) -> Result<(), String> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(format!("{name} must be finite"))
    }
}

fn at_least(name: &str, n: usize, min: usize) -> Result<(), String> {
    if n >= min {
        Ok(())
    } else {
        Err(format!("{name} = {n} must be at least {min}"))
    }
}

/// Zero crossings of `f` on the grid, refined by bisection to `tol`.
fn sign_changes(f: impl Fn(f64) -> f64, grid: &[f64], tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JcParams {
    pub nbar: Vec<f64>,
    pub kt_max: f64,
    pub points: usize,
    pub omega: f64,
    pub kappa: f64,
    pub fock_dim: usize,
    pub atom: AtomInit,
}

impl Default for JcParams {
    fn default() -> Self {
        JcParams {
            nbar: vec![0.01, 0.02, 0.03],
            kt_max: 6.0,
            points: 600,
            omega: 1.0,
            kappa: 0.1,
            fock_dim: 20,
            atom: AtomInit::Excited,
        }
    }
}

impl Experiment for JcParams {
    const NAME: &'static str = "jc-thermal";

    fn validate(&self) -> Result<(), String> {
        if self.nbar.is_empty() {
            return Err("nbar needs at least one value".into());
        }
        for &n in &self.nbar {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(format!("nbar = {n} must be ≥ 0"));
            }
        }
        positive("kt_max", self.kt_max)?;
        positive("kappa", self.kappa)?;
        finite("omega", self.omega)?;
        at_least("points", self.points, 2)
    }

    fn run(&self) -> Result<Report, CliError> {
        let grid = linspace(0.0, self.kt_max, self.points);
        let traces = self
            .nbar
            .par_iter()
            .map(|&nbar| {
                let cfg = JcConfig {
                    omega: self.omega,
                    kappa: self.kappa,
                    nbar,
                    fock_dim: self.fock_dim,
                    kt_grid: grid.clone(),
                    atom: self.atom,
                };
                jc_witness_trace(&cfg).map(|t| (nbar, t))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut report = Report {
            table: Table::new(&["kt", "nbar", "M11", "M22", "absM12", "lambda_max", "leakage"]),
            ..Default::default()
        };
        let mut leak = 0.0f64;
        for (nbar, trace) in &traces {
            let mut first_positive = None;
            for p in trace {
                leak = leak.max(p.leakage);
                if first_positive.is_none() && p.kt > 0.0 && p.lambda_max > 0.0 {
                    first_positive = Some(p.kt);
                }
                report.table.push(vec![
                    p.kt.into(),
                    (*nbar).into(),
                    p.m11.into(),
                    p.m22.into(),
                    p.abs_m12.into(),
                    p.lambda_max.into(),
                    p.leakage.into(),
                ]);
            }
            let peak = trace.iter().map(|p| p.lambda_max).fold(f64::NEG_INFINITY, f64::max);
            report.summary.push(format!(
                "nbar = {nbar}: max lambda = {peak:.6e}, first positive at kt = {}",
                first_positive.map_or("never".into(), |t| format!("{t:.4}"))
            ));
        }
        report.table.sort(2);
        report.note("fock_dim", self.fock_dim);
        report.note("max_leakage", leak);
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TavisParams {
    pub n: usize,
    pub grid: usize,
    pub omega_t_max: f64,
    pub omega: f64,
    pub kappa: f64,
    /// Bisection tolerance on sign-change locations.
    pub tolerance: f64,
}

impl Default for TavisParams {
    fn default() -> Self {
        TavisParams {
            n: 2,
            grid: 400,
            omega_t_max: TAU,
            omega: 1.0,
            kappa: 0.1,
            tolerance: 1e-12,
        }
    }
}

impl Experiment for TavisParams {
    const NAME: &'static str = "tavis";

    fn validate(&self) -> Result<(), String> {
        at_least("n", self.n, 1)?;
        at_least("grid", self.grid, 2)?;
        positive("omega_t_max", self.omega_t_max)?;
        positive("kappa", self.kappa)?;
        finite("omega", self.omega)?;
        positive("tolerance", self.tolerance)
    }

    fn run(&self) -> Result<Report, CliError> {
        let grid = linspace(0.0, self.omega_t_max, self.grid);
        let cfg = TcConfig {
            n: self.n,
            omega: self.omega,
            kappa: self.kappa,
            omega_t_grid: grid.clone(),
        };
        let trace = tc_trace(&cfg)?;
        let mut report = Report {
            table: Table::new(&[
                "omega_t",
                "atom_field_margin",
                "field_both_margin",
                "sim_atom_field_margin",
                "sim_field_both_margin",
                "excitation_drift",
            ]),
            ..Default::default()
        };
        let mut err = 0.0f64;
        let mut drift = 0.0f64;
        for p in &trace {
            err = err
                .max((p.atom_field - p.sim_atom_field).abs())
                .max((p.field_both - p.sim_field_both).abs());
            drift = drift.max(p.excitation_drift);
            report.table.push(vec![
                p.omega_t.into(),
                p.atom_field.into(),
                p.field_both.into(),
                p.sim_atom_field.into(),
                p.sim_field_both.into(),
                p.excitation_drift.into(),
            ]);
        }
        let n = self.n;
        let af = sign_changes(|x| atom_field_margin(n, x), &grid, self.tolerance);
        let fb = sign_changes(|x| field_both_margin(n, x), &grid, self.tolerance);
        report
            .summary
            .push(format!("atom-field sign changes at Ωt = {af:.10?}"));
        report
            .summary
            .push(format!("field-both sign changes at Ωt = {fb:.10?}"));
        report.summary.push(format!("max |closed − simulated| = {err:.3e}"));
        report.note("atom_field_sign_changes", &af);
        report.note("field_both_sign_changes", &fb);
        report.note("max_closed_vs_simulated", err);
        report.note("max_excitation_drift", drift);
        report.note("rabi", cfg.rabi());
        if n == 2 {
            let b = n2_boundary();
            report.note("n2_boundaries", [b, TAU - b]);
            report.summary.push(format!(
                "n = 2 boundaries: cos Ωt = 3/√2 − 2 at Ωt = {b:.10}, {:.10}",
                TAU - b
            ));
        }
        let orders = tc_epsilon_order(n)?;
        report.note(
            "epsilon_orders",
            json!({ "atom": orders.atom_orders, "field": orders.field_orders }),
        );
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DickeParams {
    pub n_atoms: usize,
    pub k: usize,
    pub field: FieldSpec,
    pub omega_t_max: f64,
    pub points: usize,
    pub omega: f64,
    pub kappa: f64,
    /// Common truncation of all three modes; derived from the field when null.
    pub fock_dim: Option<usize>,
}

impl Default for DickeParams {
    fn default() -> Self {
        DickeParams {
            n_atoms: 4,
            k: 2,
            field: FieldSpec::squeezed(0.3),
            omega_t_max: PI,
            points: 10,
            omega: 1.0,
            kappa: 0.1,
            fock_dim: None,
        }
    }
}

impl Experiment for DickeParams {
    const NAME: &'static str = "dicke";

    fn validate(&self) -> Result<(), String> {
        if !(1 <= self.k && self.k < self.n_atoms) {
            return Err(format!(
                "need 1 ≤ k < n_atoms, got k = {}, n_atoms = {}",
                self.k, self.n_atoms
            ));
        }
        positive("omega_t_max", self.omega_t_max)?;
        positive("kappa", self.kappa)?;
        finite("omega", self.omega)?;
        at_least("points", self.points, 1)?;
        if let Some(d) = self.fock_dim {
            at_least("fock_dim", d, 2)?;
        }
        Ok(())
    }

    fn run(&self) -> Result<Report, CliError> {
        let times: Vec<f64> = (1..=self.points)
            .map(|j| self.omega_t_max * j as f64 / self.points as f64)
            .collect();
        let oracles = times
            .par_iter()
            .map(|&x| {
                let mut cfg = DickeConfig::new(self.n_atoms, self.k, self.field.clone(), x);
                cfg.omega = self.omega;
                cfg.kappa = self.kappa;
                cfg.dims = self.fock_dim.map(|d| [d; 3]);
                dicke_oracle(&cfg).map(|o| (x, o))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut report = Report {
            table: Table::new(&[
                "omega_t",
                "xi1_xi2_re",
                "xi1_xi2_im",
                "n1",
                "n2",
                "xi1d_xi2_re",
                "xi1d_xi2_im",
                "n1_n2",
                "closed_max_abs_diff",
                "cond1_margin",
                "cond2_margin",
                "ppt_min_eig",
                "leakage",
                "hp_ratio",
            ]),
            ..Default::default()
        };
        let mut worst = 0.0f64;
        let mut leak = 0.0f64;
        for (x, o) in &oracles {
            let m = &o.simulated;
            let diff = m.max_abs_diff(&o.closed);
            worst = worst.max(diff);
            leak = leak.max(o.leakage);
            report.table.push(vec![
                (*x).into(),
                m.xi1_xi2.re.into(),
                m.xi1_xi2.im.into(),
                m.n1.into(),
                m.n2.into(),
                m.xi1d_xi2.re.into(),
                m.xi1d_xi2.im.into(),
                m.n1_n2.into(),
                diff.into(),
                o.cond1.margin.into(),
                o.cond2.margin.into(),
                o.ppt_min_eig.into(),
                o.leakage.into(),
                o.hp_ratio.into(),
            ]);
        }
        let dims = oracles.first().map(|(_, o)| o.dims);
        let field = self
            .field
            .vector(self.field.suggested_dim().max(dims.map_or(0, |d| d[0])))?;
        let cond = dicke_conditions(&field);
        report.summary.push(format!(
            "field tests: |⟨a²⟩|² − ⟨n⟩² = {:.6e} ({}), ⟨n⟩ − Δ²n = {:.6e} ({})",
            cond.cond2_margin,
            verdict(cond.cond2_entangled),
            cond.cond1_margin,
            verdict(cond.cond1_entangled)
        ));
        report.summary.push(format!("max |simulated − closed| = {worst:.3e}"));
        report.note("dims", dims);
        report.note("max_leakage", leak);
        report.note("max_closed_vs_simulated", worst);
        report.note(
            "field_conditions",
            json!({
                "cond2_margin": cond.cond2_margin,
                "cond2_entangled": cond.cond2_entangled,
                "cond1_margin": cond.cond1_margin,
                "cond1_entangled": cond.cond1_entangled,
            }),
        );
        Ok(report)
    }
}

fn verdict(entangled: bool) -> &'static str {
    if entangled {
        "entangled"
    } else {
        "not detected"
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BsParams {
    pub t1: Vec<f64>,
    pub t2: f64,
    pub input: FieldSpec,
    pub fock_dim: usize,
}

impl Default for BsParams {
    fn default() -> Self {
        BsParams {
            t1: vec![FRAC_1_SQRT_2],
            t2: FRAC_1_SQRT_2,
            // −0.02 is a valid amplitude, so the constructor cannot fail here
            input: FieldSpec::epsilon_state(-0.02).expect("valid ε"),
            fock_dim: 12,
        }
    }
}

fn transmission(name: &str, t: f64) -> Result<(), String> {
    if (0.0..1.0).contains(&t) && t > 0.0 {
        Ok(())
    } else {
        Err(format!("{name} = {t} must lie in (0, 1)"))
    }
}

impl Experiment for BsParams {
    const NAME: &'static str = "beamsplitters";

    fn validate(&self) -> Result<(), String> {
        if self.t1.is_empty() {
            return Err("t1 needs at least one value".into());
        }
        for &t in &self.t1 {
            transmission("t1", t)?;
        }
        transmission("t2", self.t2)?;
        at_least("fock_dim", self.fock_dim, 2)
    }

    fn run(&self) -> Result<Report, CliError> {
        let rows = self
            .t1
            .par_iter()
            .map(|&t1| {
                let cfg = BsConfig {
                    t1,
                    r1: (1.0 - t1 * t1).sqrt(),
                    t2: self.t2,
                    r2: (1.0 - self.t2 * self.t2).sqrt(),
                    input: self.input.clone(),
                    fock_dim: self.fock_dim,
                };
                let cl = bs_conditions(&cfg)?;
                let sim = bs_simulate(&cfg)?;
                let lambda = cl.matrix.lambda_max()?;
                Ok::<_, entcrit::Error>((t1, cl, sim, lambda))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut report = Report {
            table: Table::new(&[
                "t1",
                "simple_margin",
                "M11",
                "absM12",
                "M22",
                "det_margin",
                "lambda_max",
                "sim_cond1_margin",
                "sim_lambda_max",
                "ppt_min_eig",
                "leakage",
                "photons_out",
            ]),
            ..Default::default()
        };
        let mut leak = 0.0f64;
        for (t1, cl, sim, lambda) in &rows {
            let m = &cl.matrix.matrix;
            leak = leak.max(sim.leakage);
            report.table.push(vec![
                (*t1).into(),
                cl.simple_margin.into(),
                m[(0, 0)].re.into(),
                m[(0, 1)].norm().into(),
                m[(1, 1)].re.into(),
                cl.det_margin.into(),
                (*lambda).into(),
                sim.cond1.margin.into(),
                sim.matrix.lambda_max()?.into(),
                sim.ppt_min_eig.into(),
                sim.leakage.into(),
                sim.photons_out.into(),
            ]);
            report.summary.push(format!(
                "t1 = {t1:.6}: simple test {}, matrix test {}",
                verdict(cl.simple_entangled),
                verdict(cl.matrix_positive)
            ));
        }
        report.table.sort(1);
        report.note("fock_dim", self.fock_dim);
        report.note("max_leakage", leak);
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseParams {
    pub family: Family,
    pub c1: f64,
    pub points: usize,
    pub tolerance: f64,
    /// Draws the subspace vectors.
    pub seed: u64,
    /// Mode truncation for `psi01`.
    pub fock_dim: usize,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            family: Family::Bell,
            c1: FRAC_1_SQRT_2,
            points: 101,
            tolerance: 1e-10,
            seed: 0,
            fock_dim: 2,
        }
    }
}

impl Experiment for NoiseParams {
    const NAME: &'static str = "noise-threshold";

    fn validate(&self) -> Result<(), String> {
        if !(self.c1 > 0.0 && self.c1 < 1.0) {
            return Err(format!("c1 = {} must lie in (0, 1)", self.c1));
        }
        at_least("points", self.points, 2)?;
        positive("tolerance", self.tolerance)?;
        at_least("fock_dim", self.fock_dim, 2)
    }

    fn run(&self) -> Result<Report, CliError> {
        let grid = linspace(0.0, 1.0, self.points);
        let mut report = Report::default();
        match self.family {
            Family::Bell => {
                let fam = NoisyBell::real(self.c1)?;
                report.table = Table::new(&["s", "lhs", "rhs", "margin", "closed_margin", "entangled"]);
                for &s in &grid {
                    let r = fam.report(s)?;
                    report.table.push(vec![
                        s.into(),
                        r.lhs.into(),
                        r.rhs.into(),
                        r.margin.into(),
                        fam.closed_margin(s).into(),
                        r.entangled.into(),
                    ]);
                }
                let t = fam.threshold(self.tolerance)?;
                let closed = fam.closed_threshold();
                report.summary.push(format!("s* = {t:.10} (closed form {closed:.10})"));
                report.note("threshold", t);
                report.note("closed_threshold", closed);
                report.note("overlap", fam.overlap());
            }
            Family::Subspace => {
                let fam = CorrelatedSubspace::random(&mut trial_rng(self.seed, 0))?;
                report.table = Table::new(&["s", "lambda_max", "closed_lambda_max", "entangled"]);
                for &s in &grid {
                    let m = fam.matrix(s)?;
                    report.table.push(vec![
                        s.into(),
                        m.lambda_max()?.into(),
                        CorrelatedSubspace::closed_top(s).into(),
                        m.has_positive_eigenvalue()?.into(),
                    ]);
                }
                let t = fam.threshold(self.tolerance)?;
                report.summary.push(format!("s* = {t:.10}"));
                report.note("threshold", t);
            }
            Family::Psi01 => {
                let fam = Psi01Family::new(self.fock_dim)?;
                report.table = Table::new(&["s", "scan_value", "cond1_margin", "cond1_entangled"]);
                let rows = grid
                    .par_iter()
                    .map(|&s| Ok::<_, entcrit::Error>((s, fam.scan_value(s)?, fam.cond1(s)?)))
                    .collect::<Result<Vec<_>, _>>()?;
                for (s, v, c) in rows {
                    report
                        .table
                        .push(vec![s.into(), v.into(), c.margin.into(), c.entangled.into()]);
                }
                let t = fam.scan_threshold(self.tolerance)?;
                report.summary.push(format!(
                    "product-vector scan s* = {t:.10}; quoted {PSI01_QUOTED_THRESHOLD}, partial transpose {PSI01_PPT_THRESHOLD:.10}"
                ));
                report.note("threshold", t);
                report.note("quoted_threshold", PSI01_QUOTED_THRESHOLD);
                report.note("ppt_threshold", PSI01_PPT_THRESHOLD);
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvariantParams {
    pub probe: ProbeChoice,
    /// Squeezing of the squeezed-pair probe.
    pub r: f64,
    pub tolerance: f64,
}

impl Default for InvariantParams {
    fn default() -> Self {
        InvariantParams {
            probe: ProbeChoice::Both,
            r: 0.3,
            tolerance: 1e-8,
        }
    }
}

impl Experiment for InvariantParams {
    const NAME: &'static str = "two-mode-invariant";

    fn validate(&self) -> Result<(), String> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(format!("r = {} must be ≥ 0", self.r));
        }
        positive("tolerance", self.tolerance)
    }

    fn run(&self) -> Result<Report, CliError> {
        let mut probes = Vec::new();
        if matches!(self.probe, ProbeChoice::AtomField | ProbeChoice::Both) {
            probes.push(("atom-field", GaussianProbe::AtomField));
        }
        if matches!(self.probe, ProbeChoice::SqueezedPair | ProbeChoice::Both) {
            probes.push((
                "squeezed-pair",
                GaussianProbe::SqueezedPair {
                    z: C64::new(self.r, 0.0),
                },
            ));
        }
        let jobs: Vec<_> = probes
            .iter()
            .flat_map(|&(name, p)| {
                gaussian_grid()
                    .into_iter()
                    .enumerate()
                    .map(move |(i, g)| (name, i, p, g))
            })
            .collect();
        let points = jobs
            .par_iter()
            .map(|&(name, i, p, g)| gaussian_point(p, g).map(|pt| (name, i, pt)))
            .collect::<Result<Vec<_>, _>>()?;

        let mut report = Report {
            table: Table::new(&[
                "probe",
                "index",
                "alpha_re",
                "alpha_im",
                "theta",
                "z_re",
                "z_im",
                "lambda_max",
                "positive",
                "fock_dim",
            ]),
            ..Default::default()
        };
        for (name, i, pt) in &points {
            let g = &pt.params;
            report.table.push(vec![
                Cell::from(*name),
                (*i).into(),
                g.alpha.re.into(),
                g.alpha.im.into(),
                g.theta.into(),
                g.z.re.into(),
                g.z.im.into(),
                pt.lambda_max.into(),
                pt.positive.into(),
                pt.dim.into(),
            ]);
        }
        report.table.sort(2);
        for &(name, _) in &probes {
            let hits = points.iter().filter(|(n, _, pt)| *n == name && pt.positive).count();
            let total = points.iter().filter(|(n, _, _)| *n == name).count();
            report
                .summary
                .push(format!("{name}: positive eigenvalue at {hits}/{total} transformations"));
            report.note(&format!("{name}_positive"), hits);
        }
        if matches!(self.probe, ProbeChoice::SqueezedPair | ProbeChoice::Both) {
            let t = squeezed_pair_threshold(self.tolerance)?;
            let plain = squeezed_pair_cond1(self.r)?;
            report.summary.push(format!(
                "plain a, b test at r = {}: margin {:.6e} ({}); stops firing at tanh r = {t:.8}",
                self.r,
                plain.margin,
                verdict(plain.entangled)
            ));
            report.note("plain_test_margin", plain.margin);
            report.note("plain_test_closed_margin", squeezed_pair_closed_margin(self.r));
            report.note("plain_test_threshold_tanh_r", t);
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LurParams {
    pub instance: LurInstance,
    pub r_max: f64,
    /// Grid size in `r` (two-mode) or `θ` (atom–field).
    pub points: usize,
    pub fock_dim: usize,
    pub branch: Branch,
    pub phis: Vec<f64>,
}

impl Default for LurParams {
    fn default() -> Self {
        LurParams {
            instance: LurInstance::TwoModeSqueezed,
            r_max: 0.6,
            points: 61,
            fock_dim: 48,
            branch: Branch::Correlating,
            phis: vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI],
        }
    }
}

impl Experiment for LurParams {
    const NAME: &'static str = "lur";

    fn validate(&self) -> Result<(), String> {
        positive("r_max", self.r_max)?;
        at_least("points", self.points, 3)?;
        at_least("fock_dim", self.fock_dim, 2)?;
        if self.instance == LurInstance::AtomField && self.phis.is_empty() {
            return Err("phis needs at least one value".into());
        }
        self.phis.iter().try_for_each(|&p| finite("phis", p))
    }

    fn run(&self) -> Result<Report, CliError> {
        let mut report = Report::default();
        match self.instance {
            LurInstance::TwoModeSqueezed => {
                let branch = match self.branch {
                    Branch::Correlating => SqueezeBranch::Correlating,
                    Branch::Literal => SqueezeBranch::Literal,
                };
                let rs = linspace(0.0, self.r_max, self.points);
                let reps = rs
                    .par_iter()
                    .map(|&r| two_mode_squeezed_lur(r, self.fock_dim, branch).map(|rep| (r, rep)))
                    .collect::<Result<Vec<_>, _>>()?;
                report.table = Table::new(&["r", "value", "closed", "bound", "margin", "entangled"]);
                let mut err = 0.0f64;
                for (r, rep) in &reps {
                    let closed = two_mode_squeezed_closed(*r, branch);
                    err = err.max((rep.value - closed).abs());
                    report.table.push(vec![
                        (*r).into(),
                        rep.value.into(),
                        closed.into(),
                        rep.bound.into(),
                        rep.margin.into(),
                        rep.entangled.into(),
                    ]);
                }
                let hits = reps.iter().filter(|(_, rep)| rep.entangled).count();
                report.summary.push(format!(
                    "bound violated at {hits}/{} r values; max |value − closed| = {err:.3e}",
                    reps.len()
                ));
                report.note("max_closed_vs_simulated", err);
            }
            LurInstance::AtomField => {
                let scans = atom_field_phase_scan(&self.phis, self.points)?;
                report.table = Table::new(&[
                    "phi",
                    "min_value",
                    "has_window",
                    "theta_lo",
                    "theta_hi",
                    "exact_theta_lo",
                    "exact_theta_hi",
                ]);
                for w in &scans {
                    let (lo, hi) = w.window.unwrap_or((f64::NAN, f64::NAN));
                    let (elo, ehi) = atom_field_window(w.phi).unwrap_or((f64::NAN, f64::NAN));
                    report.table.push(vec![
                        w.phi.into(),
                        w.min_value.into(),
                        w.window.is_some().into(),
                        lo.into(),
                        hi.into(),
                        elo.into(),
                        ehi.into(),
                    ]);
                    report.summary.push(match w.window {
                        Some((lo, hi)) => format!("φ = {:.6}: violated for θ in [{lo:.6}, {hi:.6}]", w.phi),
                        None => format!("φ = {:.6}: no violation (min {:.6})", w.phi, w.min_value),
                    });
                }
                report.table.sort(1);
                report.note("theta_step", PI / (self.points - 1) as f64);
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PptParams {
    pub trials: usize,
    pub seed: u64,
}

impl Default for PptParams {
    fn default() -> Self {
        PptParams { trials: 500, seed: 0 }
    }
}

impl Experiment for PptParams {
    const NAME: &'static str = "ppt-crosscheck";

    fn validate(&self) -> Result<(), String> {
        at_least("trials", self.trials, 1)
    }

    fn run(&self) -> Result<Report, CliError> {
        let (summary, outcomes) = monte_carlo_ppt(self.seed, self.trials)?;
        let mut report = Report {
            table: Table::new(&[
                "trial",
                "dim_a",
                "dim_b",
                "cond1_margin",
                "cond2_margin",
                "ppt_min_eig",
                "flagged",
                "separable_flagged",
            ]),
            ..Default::default()
        };
        for o in &outcomes {
            report.table.push(vec![
                (o.trial as usize).into(),
                o.dims.0.into(),
                o.dims.1.into(),
                o.check.cond1.margin.into(),
                o.check.cond2.margin.into(),
                o.check.ppt_min_eig.into(),
                o.check.flagged().into(),
                o.separable_flagged.into(),
            ]);
        }
        report.table.sort(1);
        report.summary.push(format!(
            "{} trials: {} flagged, {} flagged without negative partial transpose, {} separable mixtures flagged",
            summary.trials, summary.flagged, summary.violations, summary.separable_flagged
        ));
        report.note(
            "summary",
            json!({
                "trials": summary.trials,
                "flagged": summary.flagged,
                "violations": summary.violations,
                "separable_flagged": summary.separable_flagged,
                "min_ppt_gap": summary.min_ppt_gap.is_finite().then_some(summary.min_ppt_gap),
                "passed": summary.passed(),
            }),
        );
        Ok(report)
    }
}
