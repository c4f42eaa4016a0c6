//! Property suite over random small models: contraction of both Bellman
//! operators, fixed-point convergence, and agreement of the belief models
//! with exact references. Everything is driven by one master seed, so the
//! report text is reproducible.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beliefs::bloom::bayes_combine;
use crate::beliefs::{BloomConditionalModel, BloomParams, DirichletBelief};
use crate::tmdp::{
    apply_operator_h, apply_operator_hbar, fixed_point_iterate, BeliefTable, JointQTable, QTable, SupNorm, TmdpSpec,
};

pub const GAMMAS: [f64; 3] = [0.5, 0.9, 0.99];

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub master_seed: u64,
    pub specs: usize,
    pub pairs: usize,
    pub contraction_slack: f64,
    pub fixed_point_tol: f64,
    pub max_iters: usize,
    pub belief_streams: usize,
    pub stream_len: usize,
    pub tv_tolerance: f64,
    pub forget_tolerance: f64,
    /// Test hook: replaces every discount with this value.
    pub gamma_override: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            master_seed: 0x5eed,
            specs: 100,
            pairs: 10,
            contraction_slack: 1e-9,
            fixed_point_tol: 1e-6,
            max_iters: 20_000,
            belief_streams: 5,
            stream_len: 10_000,
            tv_tolerance: 0.02,
            forget_tolerance: 1e-9,
            gamma_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub results: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail)?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        writeln!(f, "{} properties, {failed} failed", self.results.len())
    }
}

/// One random model of the property suite.
pub struct RandomCase {
    pub spec: TmdpSpec<f64>,
    pub belief: BeliefTable<f64>,
    pub gamma: f64,
}

/// The `i`-th random case: up to 5 states and 3 actions per side, with γ
/// cycling through [`GAMMAS`].
pub fn random_case(rng: &mut ChaCha8Rng, i: usize, gamma_override: Option<f64>) -> RandomCase {
    let ns = rng.gen_range(1..=5);
    let na = rng.gen_range(1..=3);
    let nb = rng.gen_range(1..=3);
    RandomCase {
        spec: TmdpSpec::random(rng, ns, na, nb, 1.0),
        belief: BeliefTable::random(rng, ns, nb),
        gamma: gamma_override.unwrap_or(GAMMAS[i % GAMMAS.len()]),
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    violations: usize,
    worst_ratio: f64,
    non_contracting: usize,
}

impl Tally {
    fn record(&mut self, before: f64, after: f64, gamma: f64, slack: f64) {
        self.checks += 1;
        if after > gamma * before + slack {
            self.violations += 1;
        }
        if before > 0.0 {
            self.worst_ratio = self.worst_ratio.max(after / before);
        }
    }

    fn result(&self, name: &'static str, specs: usize) -> PropertyResult {
        PropertyResult {
            name,
            passed: self.violations == 0 && self.non_contracting == 0,
            detail: format!(
                "{} pairs over {specs} specs, {} violations, {} specs with gamma >= 1, max ratio {:.6}",
                self.checks, self.violations, self.non_contracting, self.worst_ratio
            ),
        }
    }
}

fn contraction(opts: &VerifyOptions) -> [PropertyResult; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.master_seed);
    let (mut h, mut hbar) = (Tally::default(), Tally::default());
    let (mut fp_h, mut fp_hbar) = (Vec::new(), Vec::new());
    let mut fp_fail = (0usize, 0usize);
    for i in 0..opts.specs {
        let case = random_case(&mut rng, i, opts.gamma_override);
        let (ns, na, nb) = (case.spec.n_states(), case.spec.n_dm_actions(), case.spec.n_opp_actions());
        if case.gamma >= 1.0 {
            h.non_contracting += 1;
            hbar.non_contracting += 1;
        }
        for _ in 0..opts.pairs {
            let q1 = JointQTable::random(&mut rng, ns, na, nb, 10.0);
            let q2 = JointQTable::random(&mut rng, ns, na, nb, 10.0);
            let h1 = apply_operator_h(&q1, &case.spec, &case.belief, case.gamma).expect("dimensions agree");
            let h2 = apply_operator_h(&q2, &case.spec, &case.belief, case.gamma).expect("dimensions agree");
            h.record(q1.sup_dist(&q2), h1.sup_dist(&h2), case.gamma, opts.contraction_slack);

            let b1 = QTable::random(&mut rng, ns, na, 10.0);
            let b2 = QTable::random(&mut rng, ns, na, 10.0);
            let g1 = apply_operator_hbar(&b1, &case.spec, &case.belief, case.gamma).expect("dimensions agree");
            let g2 = apply_operator_hbar(&b2, &case.spec, &case.belief, case.gamma).expect("dimensions agree");
            hbar.record(b1.sup_dist(&b2), g1.sup_dist(&g2), case.gamma, opts.contraction_slack);
        }
        let tol = opts.fixed_point_tol;
        match fixed_point_iterate(
            |q: &JointQTable<f64>| apply_operator_h(q, &case.spec, &case.belief, case.gamma),
            JointQTable::new(ns, na, nb),
            tol,
            opts.max_iters,
        ) {
            Ok(fp) => fp_h.push(*fp.residuals.last().unwrap_or(&0.0)),
            Err(_) => fp_fail.0 += 1,
        }
        match fixed_point_iterate(
            |q: &QTable<f64>| apply_operator_hbar(q, &case.spec, &case.belief, case.gamma),
            QTable::new(ns, na),
            tol,
            opts.max_iters,
        ) {
            Ok(fp) => fp_hbar.push(*fp.residuals.last().unwrap_or(&0.0)),
            Err(_) => fp_fail.1 += 1,
        }
    }
    let fp_result = |name, residuals: &[f64], failed: usize| {
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        PropertyResult {
            name,
            passed: failed == 0 && worst < opts.fixed_point_tol,
            detail: format!(
                "{} of {} specs converged, {failed} did not, max final residual {worst:.3e}",
                residuals.len(),
                opts.specs
            ),
        }
    };
    [
        h.result("contraction_h", opts.specs),
        hbar.result("contraction_hbar", opts.specs),
        fp_result("fixed_point_h", &fp_h, fp_fail.0),
        fp_result("fixed_point_hbar", &fp_hbar, fp_fail.1),
    ]
}

/// Total-variation distance between two distributions.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Largest TV distance between the bloom model and exact counts over every
/// state of a random stream. Returns `(distance, distinct states)`.
pub fn bloom_oracle_stream(rng: &mut ChaCha8Rng, len: usize, n_states: usize, n_opp: usize) -> (f64, usize) {
    let mut model = BloomConditionalModel::<f64>::new(n_opp, BloomParams::default(), 1.0, 1.0).expect("valid params");
    let mut exact = vec![vec![0u32; n_opp]; n_states];
    // A per-state skew so the conditionals differ from the marginal.
    let skew: Vec<usize> = (0..n_states).map(|_| rng.gen_range(0..n_opp)).collect();
    for _ in 0..len {
        let s = rng.gen_range(0..n_states);
        let b = if rng.gen_bool(0.6) { skew[s] } else { rng.gen_range(0..n_opp) };
        model.update(s, b).expect("valid action");
        exact[s][b] += 1;
    }
    let marginal = model.marginal().predictive().expect("positive prior");
    let mut worst = 0.0f64;
    let mut seen = 0;
    for (s, counts) in exact.iter().enumerate() {
        if counts.iter().all(|&c| c == 0) {
            continue;
        }
        seen += 1;
        let oracle = bayes_combine(counts, &marginal, model.prior_pseudocount());
        let approx = model.conditional_predictive(s).expect("valid state");
        worst = worst.max(total_variation(&approx, &oracle));
    }
    (worst, seen)
}

fn bloom_oracle(opts: &VerifyOptions) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.master_seed ^ 0xb100);
    let mut worst = 0.0f64;
    let mut states = 0;
    for i in 0..opts.belief_streams {
        let n_states = [50, 500, 2_000, 5_000, 10_000][i % 5];
        let n_opp = 2 + i % 3;
        let (tv, seen) = bloom_oracle_stream(&mut rng, opts.stream_len, n_states, n_opp);
        worst = worst.max(tv);
        states += seen;
    }
    PropertyResult {
        name: "bloom_oracle",
        passed: worst <= opts.tv_tolerance,
        detail: format!(
            "{} streams of {} steps, {states} states checked, max TV {worst:.3e} (tolerance {})",
            opts.belief_streams, opts.stream_len, opts.tv_tolerance
        ),
    }
}

/// `λᵏ t₀ + (1 − λᵏ) / (1 − λ)`.
pub fn forget_total_closed_form(lambda: f64, t0: f64, k: u32) -> f64 {
    let lk = lambda.powi(k as i32);
    lk * t0 + (1.0 - lk) / (1.0 - lambda)
}

fn forget_closed_form(opts: &VerifyOptions) -> PropertyResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.master_seed ^ 0xf0f0);
    let mut worst = 0.0f64;
    let cases = 200;
    for _ in 0..cases {
        let lambda = rng.gen_range(0.05..0.999);
        let n = rng.gen_range(2..6);
        let prior: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
        let t0: f64 = prior.iter().sum();
        let mut d = DirichletBelief::new(prior, lambda).expect("valid prior");
        let k = rng.gen_range(1..2_000u32);
        for _ in 0..k {
            d.forget_observe(rng.gen_range(0..n)).expect("valid action");
        }
        worst = worst.max((d.total() - forget_total_closed_form(lambda, t0, k)).abs());
    }
    PropertyResult {
        name: "forget_closed_form",
        passed: worst <= opts.forget_tolerance,
        detail: format!("{cases} sequences, max abs error {worst:.3e} (tolerance {:e})", opts.forget_tolerance),
    }
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let mut results: Vec<PropertyResult> = contraction(opts).into();
    results.push(bloom_oracle(opts));
    results.push(forget_closed_form(opts));
    VerifyReport { results }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            specs: 12,
            pairs: 3,
            belief_streams: 2,
            stream_len: 2_000,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn small_suite_passes_and_is_reproducible() {
        let a = run_verify(&small());
        assert!(a.all_passed(), "{a}");
        assert_eq!(a.to_string(), run_verify(&small()).to_string());
    }

    #[test]
    fn unit_discount_is_flagged() {
        let r = run_verify(&VerifyOptions {
            gamma_override: Some(1.0),
            max_iters: 500,
            ..small()
        });
        assert!(!r.get("contraction_h").unwrap().passed);
        assert!(!r.get("contraction_hbar").unwrap().passed);
    }

    #[test]
    fn closed_form_small_cases() {
        assert_eq!(forget_total_closed_form(0.5, 2.0, 0), 2.0);
        assert!((forget_total_closed_form(0.5, 2.0, 1) - 2.0).abs() < 1e-15);
        assert!((forget_total_closed_form(0.8, 2.0, 1) - 2.6).abs() < 1e-15);
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
    }
}
