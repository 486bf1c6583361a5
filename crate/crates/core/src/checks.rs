//! The acceptance checks, shared by the `suite` subcommand and the test suite.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dilation::{dilate_triple, reverse_dilate};
use crate::error::Result;
use crate::matcore::{
    haar_unitary_from, min_eig, rng_from_seed, sigma_x, sigma_y, sigma_z, CMatrix, I,
};
use crate::order_iso::{
    assemble, choi_of_triple_map, complete_to_pauli_triple, inverse_map_check, pencil_psd,
    ucp_between, HermitianPencil,
};
use crate::spectrahedra::{
    ando_certificate, boundary_scale, certify_trials, in_spin_ball, joint_numerical_range_sample,
    matrix_range_membership_single, maxball_check_m2_certified, numerical_radius, pencil_value,
    spin_ball_tuple, AndoOutcome, SelfadjointTuple, ANDO_MAX_ITER, CERT_TOL, RADIUS_GRID,
};
use crate::spin_construct::{canonical_spin, conjugate, inflate, pair_from_witness, SpinTuple};
use crate::spin_pairs::{analyze_x, canonicalize_pair, disc_numerical_range_check, nilpotent_g};
use crate::spin_verify::{
    algebra_dim, commutant_dim, envelope_product_identity, intertwiner, verify_spin,
};

/// Suite parameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Reduced sample counts.
    pub quick: bool,
    pub max_iter: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            quick: false,
            max_iter: ANDO_MAX_ITER,
        }
    }
}

impl SuiteConfig {
    fn count(&self, full: usize) -> usize {
        if self.quick {
            full.div_ceil(5).max(2)
        } else {
            full
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        rng_from_seed(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// Outcome of one check. Timing is kept out of the serialized form so that
/// reports are reproducible byte for byte.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub failures: Vec<String>,
    pub budget_secs: f64,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl CheckResult {
    pub fn within_budget(&self) -> bool {
        self.elapsed_secs <= self.budget_secs
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        format!(
            "{} {} ({:.2}s / {:.0}s budget){}",
            if self.passed && self.within_budget() {
                "PASS"
            } else {
                "FAIL"
            },
            self.name,
            self.elapsed_secs,
            self.budget_secs,
            if self.failures.is_empty() {
                String::new()
            } else {
                format!(": {}", self.failures.join("; "))
            }
        )
    }
}

/// Accumulates metrics and bound violations for one check.
struct Tally {
    metrics: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            metrics: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    /// Tracks the running maximum of a metric.
    fn max(&mut self, key: &str, value: f64) {
        let e = self
            .metrics
            .entry(key.to_string())
            .or_insert(f64::NEG_INFINITY);
        if value > *e || value.is_nan() {
            *e = value;
        }
    }

    fn min(&mut self, key: &str, value: f64) {
        let e = self.metrics.entry(key.to_string()).or_insert(f64::INFINITY);
        if value < *e || value.is_nan() {
            *e = value;
        }
    }

    fn add(&mut self, key: &str, value: f64) {
        *self.metrics.entry(key.to_string()).or_insert(0.0) += value;
    }

    /// Records a failure unless `metric ≤ bound` (and metric is a number).
    fn at_most(&mut self, key: &str, bound: f64) {
        let v = self.metrics.get(key).copied().unwrap_or(f64::NAN);
        if !(v <= bound) {
            self.failures
                .push(format!("{key} = {v:.3e} exceeds {bound:.1e}"));
        }
    }

    fn at_least(&mut self, key: &str, bound: f64) {
        let v = self.metrics.get(key).copied().unwrap_or(f64::NAN);
        if !(v >= bound) {
            self.failures
                .push(format!("{key} = {v:.3e} below {bound:.1e}"));
        }
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn absorb<T>(&mut self, context: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{context}: {e}"));
                None
            }
        }
    }
}

/// A named acceptance check.
pub struct Check {
    pub name: &'static str,
    pub budget_secs: f64,
    run: fn(&SuiteConfig, &mut Tally),
}

/// All checks, in name order.
pub fn checks() -> Vec<Check> {
    vec![
        Check {
            name: "01_spin_axioms",
            budget_secs: 10.0,
            run: spin_axioms,
        },
        Check {
            name: "02_pair_canonical_form",
            budget_secs: 10.0,
            run: pair_canonical_form,
        },
        Check {
            name: "03_realization_independence",
            budget_secs: 60.0,
            run: realization_independence,
        },
        Check {
            name: "04_choi_and_dilation",
            budget_secs: 20.0,
            run: choi_and_dilation,
        },
        Check {
            name: "05_inverse_map",
            budget_secs: 5.0,
            run: inverse_map,
        },
        Check {
            name: "06_envelope_dimensions",
            budget_secs: 30.0,
            run: envelope_dimensions,
        },
        Check {
            name: "07_commutant",
            budget_secs: 20.0,
            run: commutant_check,
        },
        Check {
            name: "08_sphere_and_disc",
            budget_secs: 10.0,
            run: sphere_and_disc,
        },
        Check {
            name: "09_ball_equalities",
            budget_secs: 120.0,
            run: ball_equalities,
        },
        Check {
            name: "10_ando_solver",
            budget_secs: 120.0,
            run: ando_solver,
        },
    ]
}

pub fn check_names() -> Vec<&'static str> {
    checks().iter().map(|c| c.name).collect()
}

/// Runs the check with the given name (or numeric prefix).
pub fn run_check(name: &str, cfg: &SuiteConfig) -> Option<CheckResult> {
    let check = checks()
        .into_iter()
        .find(|c| c.name == name || c.name.split('_').next() == Some(name))?;
    Some(execute(&check, cfg))
}

fn execute(check: &Check, cfg: &SuiteConfig) -> CheckResult {
    let start = Instant::now();
    let mut tally = Tally::new();
    (check.run)(cfg, &mut tally);
    CheckResult {
        name: check.name.to_string(),
        passed: tally.failures.is_empty(),
        metrics: tally.metrics,
        failures: tally.failures,
        budget_secs: check.budget_secs,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<CheckResult> {
    checks().iter().map(|c| execute(c, cfg)).collect()
}

// ---------------------------------------------------------------------------
// Random realizations
// ---------------------------------------------------------------------------

/// Conjugation of `base` by a Haar unitary.
pub fn random_conjugate<R: Rng + ?Sized>(base: &SpinTuple, rng: &mut R) -> SpinTuple {
    let q = haar_unitary_from(rng, base.dim());
    conjugate(base, &q).expect("Haar unitary has the right shape")
}

/// Conjugation of `base ⊗ 1_r` by a Haar unitary.
pub fn random_inflated_conjugate<R: Rng + ?Sized>(
    base: &SpinTuple,
    r: usize,
    rng: &mut R,
) -> SpinTuple {
    random_conjugate(&inflate(base, r).expect("r >= 1"), rng)
}

/// Spin pair in `M_{2n}` from a Haar witness.
pub fn random_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpinTuple {
    let w = haar_unitary_from(rng, n);
    let y = haar_unitary_from(rng, 2 * n);
    pair_from_witness(n, &w, &y).expect("Haar witnesses are unitary")
}

/// Spin triple in `M_{2n}`, oriented like the Pauli triple.
pub fn random_triple<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpinTuple {
    complete_to_pauli_triple(&random_pair(n, rng)).expect("a pair always completes")
}

/// Pair `(a₁, a₂)` of Hermitian `ℓ×ℓ` matrices with `w(a₁ + i·a₂) = radius`.
pub fn random_pair_with_radius<R: Rng + ?Sized>(
    rng: &mut R,
    ell: usize,
    radius: f64,
) -> SelfadjointTuple {
    let a = SelfadjointTuple::random(rng, ell, 2);
    let w = numerical_radius(&(&a.mats()[0] + &a.mats()[1].scale(I)), RADIUS_GRID);
    a.scaled(radius / w)
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

fn spin_axioms(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(1);
    let per_m = cfg.count(20);
    for m in 2..=9 {
        let base = canonical_spin(m).expect("m >= 2");
        let mut tuples = vec![base.clone()];
        for k in 0..per_m {
            tuples.push(if k % 2 == 0 {
                random_conjugate(&base, &mut rng)
            } else {
                random_inflated_conjugate(&base, 2 + k % 4 / 2, &mut rng)
            });
        }
        for s in &tuples {
            let r = verify_spin(s, 1e-9);
            t.max("selfadjoint_residual", r.selfadjoint_residual);
            t.max("unitarity_residual", r.unitarity_residual);
            t.max("anticommute_residual", r.anticommute_residual);
            t.max("trace_max", r.traces.iter().copied().fold(0.0, f64::max));
            t.max(
                "pairwise_hs_max",
                r.pairwise_hs.iter().copied().fold(0.0, f64::max),
            );
            t.min("gram_min_eig", r.gram_min_eig);
            if !r.dim_parity_ok {
                t.fail(format!("odd dimension {}", s.dim()));
            }
            t.add("tuples", 1.0);
        }
    }
    for key in [
        "selfadjoint_residual",
        "unitarity_residual",
        "anticommute_residual",
        "trace_max",
        "pairwise_hs_max",
    ] {
        t.at_most(key, 1e-9);
    }
    let g = t.metrics["gram_min_eig"];
    if !(g > 1e-6) {
        t.fail(format!("gram_min_eig = {g:.3e} not above 1e-6"));
    }
}

fn pair_canonical_form(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(2);
    let count = cfg.count(50);
    for k in 0..count {
        let n = 1 + k % 4;
        let pair = if k % 3 == 2 {
            let base = canonical_spin(2).expect("m = 2");
            random_inflated_conjugate(&base, n, &mut rng)
        } else {
            random_pair(n, &mut rng)
        };
        let (u, v) = (pair.get(0), pair.get(1));
        let Some(cf) = t.absorb("canonicalize_pair", canonicalize_pair(u, v)) else {
            continue;
        };
        t.max("canonical_u_residual", cf.u_residual);
        t.max("canonical_v_residual", cf.v_residual);
        t.max("w_unitarity_residual", cf.w_unitarity_residual);
        let Some(a) = t.absorb("analyze_x", analyze_x(u, v)) else {
            continue;
        };
        t.max("norm_deviation", (a.norm - 2.0).abs());
        t.max("nilpotency_residual", a.nilpotency_residual);
        t.max("reduction_residual", a.reduction.reduction_residual);
        t.max("pre_shuffle_residual", a.reduction.pre_shuffle_residual);
        t.max("gram_spectrum_residual", a.gram_spectrum_residual);
        t.add("pairs", 1.0);
    }
    t.at_most("canonical_u_residual", 1e-8);
    t.at_most("canonical_v_residual", 1e-8);
    t.at_most("w_unitarity_residual", 1e-9);
    t.at_most("norm_deviation", 1e-9);
    t.at_most("nilpotency_residual", 1e-9);
    t.at_most("reduction_residual", 1e-8);
    t.at_most("pre_shuffle_residual", 1e-8);
    t.at_most("gram_spectrum_residual", 1e-8);
}

/// Random pencil whose canonical-realization minimum eigenvalue is `δ`-shifted
/// from zero, `δ ~ U(−0.5, 0.5)`, so both verdicts occur.
fn balanced_pencil<R: Rng + ?Sized>(
    rng: &mut R,
    level: usize,
    base: &SpinTuple,
) -> HermitianPencil {
    let p = HermitianPencil::random(rng, level, base.arity(), 0.0);
    let lowest = min_eig(&assemble(&p, base).expect("arity matches")).expect("Hermitian");
    let shift = -lowest + rng.random_range(-0.5..0.5);
    let mut coeffs = p.coeffs().to_vec();
    coeffs[0] = &coeffs[0] + &CMatrix::identity(level).scale_re(shift);
    HermitianPencil::new(coeffs).expect("Hermitian coefficients")
}

fn realization_independence(cfg: &SuiteConfig, t: &mut Tally) {
    const MARGIN: f64 = 1e-6;
    let mut rng = cfg.rng(3);
    let per_config = cfg.count(100);
    let mut disagreements = 0usize;
    for m in 2..=5 {
        let base = canonical_spin(m).expect("m >= 2");
        let realizations = [
            base.clone(),
            random_conjugate(&base, &mut rng),
            random_inflated_conjugate(&base, 2, &mut rng),
        ];
        for pair in realizations.windows(2) {
            let forth = ucp_between(&pair[0], &pair[1]).expect("equal arity");
            let back = ucp_between(&pair[1], &pair[0]).expect("equal arity");
            if let Some(r) = t.absorb("round trip", forth.round_trip_residual(&back)) {
                t.max("ucp_round_trip_residual", r);
            }
        }
        for n in 1..=4 {
            for _ in 0..per_config {
                let p = balanced_pencil(&mut rng, n, &base);
                let verdicts: Vec<_> = realizations
                    .iter()
                    .map(|s| pencil_psd(&p, s, 1e-9).expect("arity matches"))
                    .collect();
                t.add("pencils", 1.0);
                if verdicts.iter().any(|v| v.min_eig.abs() < MARGIN) {
                    t.add("boundary_excluded", 1.0);
                    continue;
                }
                for (i, vi) in verdicts.iter().enumerate() {
                    for (j, vj) in verdicts.iter().enumerate() {
                        if i == j {
                            continue;
                        }
                        let bad =
                            (vi.min_eig >= MARGIN && !vj.psd) || (vi.min_eig <= -MARGIN && vj.psd);
                        if bad {
                            disagreements += 1;
                        }
                    }
                }
                t.add(
                    if verdicts[0].psd {
                        "psd_pencils"
                    } else {
                        "non_psd_pencils"
                    },
                    1.0,
                );
                let spread = verdicts
                    .iter()
                    .map(|v| v.min_eig)
                    .fold(f64::NEG_INFINITY, f64::max)
                    - verdicts
                        .iter()
                        .map(|v| v.min_eig)
                        .fold(f64::INFINITY, f64::min);
                t.max("min_eig_spread", spread);
            }
        }
    }
    t.metrics
        .insert("disagreements".into(), disagreements as f64);
    t.at_most("disagreements", 0.0);
    t.at_most("ucp_round_trip_residual", 1e-9);
}

fn choi_and_dilation(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(4);
    let count = cfg.count(20);
    for k in 0..count {
        let n = [1, 2, 4][k % 3];
        let triple = random_triple(n, &mut rng);
        let Some(cp) = t.absorb("choi_of_triple_map", choi_of_triple_map(&triple)) else {
            continue;
        };
        t.min("choi_min_eig", cp.choi_min_eig);
        t.max("kraus_residual", cp.kraus_residual.unwrap_or(f64::NAN));
        t.max("unital_residual", cp.unital_residual);
        if let Some(d) = t.absorb("dilate_triple", dilate_triple(&triple)) {
            t.max("isometry_residual", d.isometry_residual);
            t.max("compression_residual", d.max_residual());
            t.max("dilation_ell", d.ell as f64);
            if 2 * d.ell < triple.dim() {
                t.fail(format!(
                    "dilation space 2·{} smaller than d = {}",
                    d.ell,
                    triple.dim()
                ));
            }
        }
        if let Some(d) = t.absorb("reverse_dilate", reverse_dilate(&triple)) {
            t.max("reverse_isometry_residual", d.isometry_residual);
            t.max("reverse_compression_residual", d.max_residual());
        }
        t.add("triples", 1.0);
    }
    t.at_least("choi_min_eig", -1e-9);
    t.at_most("kraus_residual", 1e-8);
    t.at_most("isometry_residual", 1e-9);
    t.at_most("compression_residual", 1e-8);
    t.at_most("reverse_isometry_residual", 1e-9);
    t.at_most("reverse_compression_residual", 1e-8);
}

fn inverse_map(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(5);
    let pairs = cfg.count(50);
    for n in 1..=4 {
        let triple = random_triple(n, &mut rng);
        let Some(cp) = t.absorb("choi_of_triple_map", choi_of_triple_map(&triple)) else {
            continue;
        };
        let kraus = cp.kraus.unwrap_or_default();
        let seed = rng.random();
        if let Some(r) = t.absorb(
            "inverse_map_check",
            inverse_map_check(&triple, &kraus, pairs, seed),
        ) {
            t.max("identity_residual", r.identity_residual);
            t.max("trace_identity_residual", r.trace_identity_residual);
        }
    }
    t.at_most("identity_residual", 1e-8);
    t.at_most("trace_identity_residual", 1e-9);
}

fn envelope_dimensions(_cfg: &SuiteConfig, t: &mut Tally) {
    for k in 1..=3usize {
        let expected = 4usize.pow(k as u32);
        for m in [2 * k, 2 * k + 1] {
            let s = canonical_spin(m).expect("m >= 2");
            if let Some(dim) = t.absorb("algebra_dim", algebra_dim(s.unitaries(), 32)) {
                t.metrics.insert(format!("algebra_dim_m{m}"), dim as f64);
                if dim != expected {
                    t.fail(format!(
                        "algebra_dim(canonical_spin({m})) = {dim}, expected {expected}"
                    ));
                }
            }
        }
        if let Some(r) = t.absorb("envelope_product_identity", envelope_product_identity(k)) {
            t.max("product_identity_residual", r);
        }
    }
    t.at_most("product_identity_residual", 1e-12);
}

fn commutant_check(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(7);
    for m in 2..=7 {
        let s = canonical_spin(m).expect("m >= 2");
        if let Some(k) = t.absorb("commutant_dim", commutant_dim(s.unitaries(), s.dim())) {
            if k != 1 {
                t.fail(format!("canonical_spin({m}) has commutant dimension {k}"));
            }
        }
        let v = random_conjugate(&s, &mut rng);
        match t.absorb("intertwiner", intertwiner(&s, &v)).flatten() {
            Some(q) => {
                let worst = s
                    .unitaries()
                    .iter()
                    .zip(v.unitaries())
                    .map(|(a, b)| q.adjoint().matmul(a).matmul(&q).distance(b))
                    .fold(0.0, f64::max);
                t.max("intertwiner_residual", worst);
            }
            None => t.fail(format!("no intertwiner recovered for m = {m}")),
        }
    }
    for m in 2..=5 {
        let s = canonical_spin(m).expect("m >= 2");
        for r in [2, 3] {
            let inflated = random_inflated_conjugate(&s, r, &mut rng);
            if let Some(k) = t.absorb(
                "commutant_dim",
                commutant_dim(inflated.unitaries(), inflated.dim()),
            ) {
                if k != r * r {
                    t.fail(format!(
                        "inflate(canonical_spin({m}), {r}) has commutant dimension {k}"
                    ));
                }
            }
        }
    }
    t.at_most("intertwiner_residual", 1e-8);
}

fn sphere_and_disc(cfg: &SuiteConfig, t: &mut Tally) {
    let samples = if cfg.quick { 2_000 } else { 10_000 };
    let pauli = [sigma_x(), sigma_y(), sigma_z()];
    match joint_numerical_range_sample(&pauli, samples, cfg.seed) {
        Ok(pts) => {
            for p in &pts {
                let r = p.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
                t.max("sphere_deviation", (r - 1.0).abs());
                t.max(
                    "imaginary_part",
                    p.iter().map(|z| z.im.abs()).fold(0.0, f64::max),
                );
            }
        }
        Err(e) => t.fail(format!("sampling: {e}")),
    }
    match joint_numerical_range_sample(&pauli[..2], samples, cfg.seed.wrapping_add(1)) {
        Ok(pts) => {
            for p in &pts {
                t.max(
                    "pair_radius_excess",
                    (p[0].re.hypot(p[1].re) - 1.0).max(0.0),
                );
            }
        }
        Err(e) => t.fail(format!("sampling: {e}")),
    }
    let disc = disc_numerical_range_check(&nilpotent_g(), samples, cfg.seed.wrapping_add(2));
    t.max("disc_max_abs_excess", (disc.max_abs - 1.0).max(0.0));
    t.max("disc_coverage_gap", disc.coverage_gap);
    t.at_most("sphere_deviation", 1e-10);
    t.at_most("imaginary_part", 1e-12);
    t.at_most("pair_radius_excess", 1e-10);
    t.at_most("disc_max_abs_excess", 1e-10);
    if !cfg.quick {
        t.at_most("disc_coverage_gap", 0.05);
    }
}

fn ball_equalities(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(9);

    // m = 1: spin ball against the norm ball and the single-unitary range test
    let mut mismatches = 0usize;
    for k in 0..cfg.count(200) {
        let level = 1 + k % 4;
        let h = SelfadjointTuple::random(&mut rng, level, 1);
        let h = h.scaled(rng.random_range(0.5..1.5) / h.mats()[0].op_norm());
        let norm = h.mats()[0].op_norm();
        if (norm - 1.0).abs() < 1e-6 {
            t.add("m1_boundary_excluded", 1.0);
            continue;
        }
        let spin = in_spin_ball(1, &h, 1e-9).expect("arity 1");
        let range = matrix_range_membership_single(2, &h.mats()[0]).expect("Hermitian");
        if spin != (norm <= 1.0) || range != spin {
            mismatches += 1;
        }
        t.add("m1_samples", 1.0);
    }
    t.metrics.insert("m1_mismatches".into(), mismatches as f64);
    t.at_most("m1_mismatches", 0.0);

    // m = 2: certified trial pairs
    let trials: Vec<_> = (0..cfg.count(20))
        .map(|k| {
            let radius = rng.random_range(0.3..0.95);
            random_pair_with_radius(&mut rng, 2 + k % 2, radius)
        })
        .collect();
    let Some(certs) = t.absorb("certify_trials", certify_trials(&trials, cfg.max_iter)) else {
        return;
    };
    for c in &certs {
        t.max("trial_radius", c.radius);
        match &c.certified {
            Some(p) => {
                t.max("ando_residual", p.certificate.feasibility_residual);
                t.min("psi_choi_min_eig", p.map.choi_min_eig);
                t.max("psi_unital_residual", p.map.unital_residual);
                t.max("psi_span_residual", p.span_residual);
            }
            None => t.fail(format!(
                "trial with radius {:.3} was not certified",
                c.radius
            )),
        }
    }

    let spin = spin_ball_tuple(2).expect("m = 2");
    let pair_tuple = SelfadjointTuple::new(vec![sigma_x(), sigma_y()]).expect("Hermitian");
    let mut violations = 0usize;
    let mut missed_witnesses = 0usize;
    for k in 0..cfg.count(50) * 2 {
        let inside = k % 2 == 0;
        let level = 1 + k / 2 % 3;
        let h = SelfadjointTuple::random(&mut rng, level, 2);
        let scale = boundary_scale(&spin, &h).expect("arity 2");
        let factor = if inside {
            rng.random_range(0.1..0.99)
        } else {
            rng.random_range(1.01..2.0)
        };
        let h = h.scaled(factor * scale);
        let Some(report) = t.absorb("maxball_check_m2", maxball_check_m2_certified(&h, &certs))
        else {
            continue;
        };
        if inside {
            if !report.in_spin_ball {
                t.fail(format!(
                    "constructed interior point has spin min eig {:.3e}",
                    report.spin_min_eig
                ));
            }
            violations += report.violations;
            for trial in &report.trials {
                if let Some(e) = trial.pencil_min_eig {
                    t.min("inside_pencil_min_eig", e);
                }
                if let Some(r) = trial.transfer_residual {
                    t.max("transfer_residual", r);
                }
            }
        } else {
            let witness =
                min_eig(&pencil_value(&pair_tuple, &h).expect("arity 2")).expect("Hermitian");
            t.max("outside_witness_min_eig", witness);
            if report.in_spin_ball || witness >= -CERT_TOL {
                missed_witnesses += 1;
            }
        }
    }
    t.metrics.insert("m2_violations".into(), violations as f64);
    t.metrics
        .insert("m2_missed_witnesses".into(), missed_witnesses as f64);
    t.at_most("m2_violations", 0.0);
    t.at_most("m2_missed_witnesses", 0.0);
    t.at_least("inside_pencil_min_eig", -CERT_TOL);
    t.at_most("ando_residual", 1e-7);
    t.at_least("psi_choi_min_eig", -1e-7);
    t.at_most("psi_unital_residual", 1e-9);
    t.at_most("psi_span_residual", 1e-9);
}

fn ando_solver(cfg: &SuiteConfig, t: &mut Tally) {
    let mut rng = cfg.rng(10);
    let count = cfg.count(40);
    for k in 0..count {
        let feasible_side = k % 2 == 0;
        let radius = if feasible_side {
            rng.random_range(0.5..0.95)
        } else {
            rng.random_range(1.05..1.5)
        };
        let a = random_pair_with_radius(&mut rng, 2 + k % 3, radius);
        let (a1, a2) = (&a.mats()[0], &a.mats()[1]);
        let Some(outcome) = t.absorb("ando_certificate", ando_certificate(a1, a2, cfg.max_iter))
        else {
            continue;
        };
        match (feasible_side, outcome) {
            (true, AndoOutcome::Feasible(c)) => {
                let id = CMatrix::identity(c.b.rows());
                t.max("feasible_residual", c.feasibility_residual);
                t.min("b_min_eig", min_eig(&c.b).expect("Hermitian"));
                t.min(
                    "one_minus_b_min_eig",
                    min_eig(&(&id - &c.b)).expect("Hermitian"),
                );
                t.min(
                    "block_min_eig",
                    min_eig(&c.block_matrix()).expect("Hermitian"),
                );
                t.max("feasible_iterations", c.iterations as f64);
            }
            (true, AndoOutcome::Infeasible { residual, .. }) => t.fail(format!(
                "radius {radius:.3} reported infeasible (residual {residual:.2e})"
            )),
            (false, AndoOutcome::Feasible(c)) => t.fail(format!(
                "radius {radius:.3} reported feasible (residual {:.2e})",
                c.feasibility_residual
            )),
            (false, AndoOutcome::Infeasible { residual, .. }) => {
                t.min("infeasible_residual", residual)
            }
        }
    }
    t.at_most("feasible_residual", 1e-7);
    t.at_least("b_min_eig", -1e-7);
    t.at_least("one_minus_b_min_eig", -1e-7);
    t.at_least("block_min_eig", -1e-7);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_unique() {
        let names = check_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
        assert_eq!(names.len(), 10);
    }

    #[test]
    fn lookup_by_prefix() {
        let cfg = SuiteConfig {
            quick: true,
            ..SuiteConfig::default()
        };
        let r = run_check("06", &cfg).unwrap();
        assert_eq!(r.name, "06_envelope_dimensions");
        assert!(run_check("99", &cfg).is_none());
    }

    #[test]
    fn quick_results_are_reproducible() {
        let cfg = SuiteConfig {
            quick: true,
            ..SuiteConfig::default()
        };
        let a = serde_json::to_string(&run_check("02", &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_check("02", &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
