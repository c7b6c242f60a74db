//! Model-level checks: closed forms against simulation on small grids,
//! conservation laws, and partial-transpose consistency of flagged states.

use entcrit::linalg::{c, max_abs_diff, C64};
use entcrit::models::beamsplitter::{bs_conditions, bs_simulate, closed_matrix, BsConfig};
use entcrit::models::dicke::{dicke_mode_matrix, dicke_oracle, normal_modes, normal_modes_inverse, DickeConfig};
use entcrit::models::families::{CorrelatedSubspace, NoisyBell};
use entcrit::models::field::FieldMoments;
use entcrit::models::tavis::{
    atom_field_margin, field_both_margin, simulated_atom_field_margin, simulated_field_both_margin, tc_full_state,
    tc_trace, TcConfig,
};
use entcrit::models::{threshold_scan, FieldSpec};
use entcrit::witness::{ppt_min_eig, random_vector, trial_rng, witness_tolerance};
use entcrit::ComplexMatrix;
use proptest::prelude::*;

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn splitters(t1: f64, t2: f64, input: FieldSpec, fock_dim: usize) -> BsConfig {
    BsConfig {
        t1,
        r1: (1.0 - t1 * t1).sqrt(),
        t2,
        r2: (1.0 - t2 * t2).sqrt(),
        input,
        fock_dim,
    }
}

#[test]
fn tavis_cummings_grid() {
    for n in 1..=6 {
        for x in grid(0.1, 6.0, 10) {
            let psi = tc_full_state(n, x, 1.0, 0.1).unwrap();
            let af = simulated_atom_field_margin(n, &psi).unwrap();
            let fb = simulated_field_both_margin(n, &psi).unwrap();
            assert!((af - atom_field_margin(n, x)).abs() < 1e-7, "n={n} Ωt={x}");
            assert!((fb - field_both_margin(n, x)).abs() < 1e-7, "n={n} Ωt={x}");

            let rho = psi.to_density();
            if af > witness_tolerance(0.0) {
                let pair = rho.reduced(&["field", "atom1"]).unwrap();
                assert!(ppt_min_eig(&pair, &["atom1"]).unwrap() < -1e-10, "n={n} Ωt={x}");
            }
            if fb > witness_tolerance(0.0) {
                assert!(ppt_min_eig(&rho, &["field"]).unwrap() < -1e-10, "n={n} Ωt={x}");
            }
        }
        let trace = tc_trace(&TcConfig::new(n, grid(0.0, 20.0, 10))).unwrap();
        assert!(trace.iter().all(|p| p.excitation_drift < 1e-8));
    }
}

#[test]
fn dicke_grid() {
    let inputs = [
        FieldSpec::coherent(c(0.5, 0.2)),
        FieldSpec::Fock { n: 2 },
        FieldSpec::squeezed(0.2),
    ];
    for field in inputs {
        for x in grid(0.2, 3.0, 10) {
            let o = dicke_oracle(&DickeConfig::new(4, 2, field.clone(), x)).unwrap();
            assert!(o.simulated.max_abs_diff(&o.closed) < 1e-7, "{field:?} Ωt={x}");
            if o.cond1.entangled || o.cond2.entangled {
                assert!(o.ppt_min_eig < -1e-10, "{field:?} Ωt={x}");
            }
            assert!(o.hp_ratio < 1.0);
        }
    }
}

#[test]
fn beam_splitter_grid() {
    let inputs = [
        FieldSpec::Fock { n: 1 },
        FieldSpec::squeezed(0.25),
        FieldSpec::epsilon_state(-0.02).unwrap(),
        FieldSpec::custom(&[c(0.5, 0.0), c(0.1, 0.3), c(0.4, -0.2), c(0.0, 0.2)]),
    ];
    for input in inputs {
        let n_in = FieldMoments::of(&input.vector(14).unwrap()).n;
        for t1 in grid(0.2, 0.9, 10) {
            let cfg = splitters(t1, 0.6, input.clone(), 14);
            let cl = bs_conditions(&cfg).unwrap();
            let sim = bs_simulate(&cfg).unwrap();
            assert!(
                max_abs_diff(&cl.matrix.matrix, &sim.matrix.matrix) < 1e-7,
                "{input:?} t1={t1}"
            );
            assert!((sim.cond1.margin - cfg.gain().powi(2) * cl.simple_margin).abs() < 1e-7);
            assert_eq!(sim.matrix_condition, cl.matrix_condition);
            assert!((sim.photons_out - n_in).abs() < 1e-12);
            if sim.cond1.entangled || sim.matrix_condition || sim.matrix_positive {
                assert!(sim.ppt_min_eig < -1e-10, "{input:?} t1={t1}");
            }
        }
    }
}

#[test]
fn flagged_family_states_fail_ppt() {
    let bell = NoisyBell::real(0.6).unwrap();
    let sub = CorrelatedSubspace::random(&mut trial_rng(5, 0)).unwrap();
    for s in grid(0.05, 1.0, 10) {
        if bell.report(s).unwrap().entangled {
            let rho = bell.state(s).unwrap().reduced(&["a", "b"]).unwrap();
            assert!(ppt_min_eig(&rho, &["a"]).unwrap() < -1e-10, "s={s}");
        }
        if sub.matrix(s).unwrap().has_positive_eigenvalue().unwrap() {
            let rho = sub.state(s).unwrap().reduced(&["a", "b"]).unwrap();
            assert!(ppt_min_eig(&rho, &["a"]).unwrap() < -1e-10, "s={s}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dicke_modes_diagonalize(n_atoms in 2usize..40, k_frac in 0.0f64..1.0, omega in -2.0f64..2.0, kappa in 0.01f64..1.0) {
        let k = 1 + ((n_atoms - 1) as f64 * k_frac) as usize % (n_atoms - 1);
        let t = normal_modes(n_atoms, k);
        let tinv = normal_modes_inverse(n_atoms, k);
        prop_assert!(max_abs_diff(&(&tinv * &t), &ComplexMatrix::identity(3, 3)) < 1e-12);
        let d = &t * dicke_mode_matrix(n_atoms, k, omega, kappa) * t.transpose();
        let big = kappa * (n_atoms as f64).sqrt();
        let want = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(omega - big, 0.0),
            c(omega, 0.0),
            c(omega + big, 0.0),
        ]));
        prop_assert!(max_abs_diff(&d, &want) < 1e-12);
    }

    #[test]
    fn bs_reduced_identity(seed in any::<u64>(), dim in 2usize..8, r1 in 0.1f64..1.0, gain in 0.01f64..1.0) {
        let v = random_vector(&mut trial_rng(seed, 0), dim);
        let m = FieldMoments::of(&v);
        let raw = closed_matrix(&m, r1, gain).unwrap();
        let det = raw[(0, 1)].norm_sqr() - raw[(0, 0)].re * raw[(1, 1)].re;
        let lhs = (m.a2 * m.n - m.na2).norm_sqr();
        let rhs = (m.n - m.variance()) * (m.a2.norm_sqr() - m.n2 + (1.0 - 1.0 / (r1 * r1)) * m.n);
        let k4 = gain.powi(4);
        prop_assert!((det - k4 * (lhs - rhs)).abs() <= 1e-12 * (1.0 + k4 * (lhs.abs() + rhs.abs())));
    }

    #[test]
    fn threshold_scan_locates_step(cut in 0.01f64..0.99, tol in 1e-9f64..1e-3) {
        let s = threshold_scan(|x| x > cut, 0.0, 1.0, tol).unwrap();
        prop_assert!((s - cut).abs() <= tol);
    }
}

#[test]
fn custom_amplitudes_roundtrip_moments() {
    let amps: Vec<C64> = vec![c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)];
    let v = FieldSpec::custom(&amps).vector(6).unwrap();
    let m = FieldMoments::of(&v);
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let n = (amps[1].norm_sqr() + 2.0 * amps[2].norm_sqr()) / norm;
    assert!((m.n - n).abs() < 1e-14);
}
