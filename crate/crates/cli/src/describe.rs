pub struct Entry {
    pub name: &'static str,
    pub summary: &'static str,
    pub details: &'static str,
}

pub const EXPERIMENTS: [Entry; 8] = [
    Entry {
        name: "jc-thermal",
        summary: "Jaynes–Cummings atom with a thermal field: witness matrix over time",
        details: "\
Resonant Jaynes–Cummings Hamiltonian H = ω a†a + (ω/2)σz + κ(σ⁺a + σ⁻a†), atom
initially excited, field thermal with mean photon number nbar. The 2×2 matrix
M in the basis {Δa, Δa†} with B = σ⁻ is evaluated on the evolved state; a
positive eigenvalue certifies atom–field entanglement.

Columns: kt, nbar, M11, M22, absM12, lambda_max, leakage.
Parameters: nbar (list), kt_max, points, omega, kappa, fock_dim, atom.",
    },
    Entry {
        name: "tavis",
        summary: "Tavis–Cummings model with n excitations: closed forms against evolution",
        details: "\
Two atoms in a common mode, initial state |n,g,g⟩. The atom–field test uses
the matrix with A = σ₁⁻ and field basis {Δa, Δa†}; the field–both-atoms test
uses A = a, B = J⁻. Both are evaluated in closed form and on the state evolved
within the n-excitation sector. Sign changes are located by bisection; the
summary gives the n = 2 boundary cos Ωt = 3/√2 − 2 and the small-Ωt series
orders.

Columns: omega_t, atom_field_margin, field_both_margin, sim_atom_field_margin,
sim_field_both_margin, excitation_drift.
Parameters: n, grid, omega_t_max, omega, kappa, tolerance.",
    },
    Entry {
        name: "dicke",
        summary: "Dicke model split into two atomic groups, Holstein–Primakoff bosons",
        details: "\
N atoms coupled to one mode with the Dicke Hamiltonian; the groups of k and N−k
atoms are bosonized to lowest Holstein–Primakoff order as modes ξ₁, ξ₂.
The three-mode passive evolution is simulated sector by sector and the
ξ₁ξ₂ moments are compared with their closed forms. The field tests
|⟨a²⟩|² > ⟨n⟩² and ⟨n⟩ > Δ²n on the input decide entanglement of the groups.

Columns: omega_t, simulated moments, closed_max_abs_diff, cond1_margin,
cond2_margin, ppt_min_eig, leakage, hp_ratio.
Parameters: n_atoms, k, field, omega_t_max, points, omega, kappa, fock_dim.",
    },
    Entry {
        name: "beamsplitters",
        summary: "Two cascaded beam splitters: output entanglement from input statistics",
        details: "\
Input mode a passes a splitter (t1, r1) into b, then a second splitter
(t2, r2) into c. Sub-Poissonian input gives entanglement of b and c through
the simple test; the 2×2 matrix in {b†, b} with B = c also detects some
super-Poissonian inputs. Both are compared with the simulated output state.

Columns: t1, simple_margin, M11, absM12, M22, det_margin, lambda_max,
sim_cond1_margin, sim_lambda_max, ppt_min_eig, leakage, photons_out.
Parameters: t1 (list), t2, input, fock_dim.",
    },
    Entry {
        name: "noise-threshold",
        summary: "Mixing thresholds of noisy two-party families",
        details: "\
bell: s|ψ⟩⟨ψ| + (1−s)I/4 with |ψ⟩ = c1|00⟩ + c2|11⟩; threshold against the
closed form. subspace: four-dimensional correlated subspace built from a
seeded random pair of vectors. psi01: (|0,1⟩ + |1,0⟩)/√2 with noise on
{|0⟩, |1⟩}², tested with the bilinear-form criterion through a product-vector
scan; the partial-transpose threshold 1/3 is reported alongside.

Columns depend on the family; margins and eigenvalues are always present.
Parameters: family, c1, points, tolerance, seed, fock_dim.",
    },
    Entry {
        name: "two-mode-invariant",
        summary: "Witness matrices under single-mode Gaussian transformations",
        details: "\
Expanding one side in {Δa, Δa†} makes the test invariant under displacement,
rotation and squeezing of that mode. Two probe states are transformed by 27
Gaussian unitaries D(α)R(θ)S(z) and the top eigenvalue is recorded; the
plain A = a, B = b test on the squeezed pair is given for contrast.

Columns: probe, index, alpha_re, alpha_im, theta, z_re, z_im, lambda_max,
positive, fock_dim.
Parameters: probe, r, tolerance.",
    },
    Entry {
        name: "lur",
        summary: "Local uncertainty relations with non-Hermitian operators",
        details: "\
Δ²(A+B) summed over pairs is at least 1 for separable states. two-mode-squeezed:
A = a, B = b† on a two-mode squeezed vacuum, closed form e^{∓2r} per branch.
atom-field: A = a†, B = σ⁺ on cos θ|e,0⟩ + e^{iφ} sin θ|g,1⟩, violation window
in θ between 0 and atan(−cos φ).

Columns: r, value, closed, bound, margin, entangled (two-mode-squeezed);
phi, min_value, has_window, theta_lo, theta_hi, exact_theta_lo,
exact_theta_hi (atom-field).
Parameters: instance, r_max, points, fock_dim, branch, phis.",
    },
    Entry {
        name: "ppt-crosscheck",
        summary: "Monte Carlo check that every flagged state has a non-positive partial transpose",
        details: "\
Any state flagged by either base test has a negative partial transpose: both
tests are weaker than the partial-transpose criterion. Random pure states on 2⊗4 and 3⊗3 with random
lowering-type local operators are tested; every flagged state must fail the
partial transpose, and seeded separable mixtures must never be flagged.
Per-trial seeds derive from the master seed by counter.

Columns: trial, dim_a, dim_b, cond1_margin, cond2_margin, ppt_min_eig,
flagged, separable_flagged.
Parameters: trials, seed.",
    },
];

pub fn find(name: &str) -> Option<&'static Entry> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}
