//! Inequality checks on random finite channels, where every quantity is
//! exact.

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{
    accuracy_from_tv, bhattacharyya, chernoff_lower_bound_from_tv, theorem_mi_lower_bound,
    tv_lower_bound_from_expectation, BoundInputs,
};
use crate::error::Result;
use crate::estimators::{
    exact_bayes_error, exact_chernoff, exact_mi, exact_tv, product_channel, DiscreteChannel,
};
use crate::rng::{layer_rng, mix64, Layer};

/// Slack for floating-point comparisons between exact quantities.
pub const ORACLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSettings {
    pub channels: usize,
    pub statistics_per_channel: usize,
    pub max_outputs: usize,
    pub seed: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            channels: 1000,
            statistics_per_channel: 10,
            max_outputs: 8,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub channel: usize,
    pub detail: String,
}

/// Number of instances each check saw and what failed.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSummary {
    pub settings: OracleSettings,
    pub checks: Vec<(&'static str, usize)>,
    pub violations: Vec<Violation>,
}

impl OracleSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, check: &str) -> usize {
        self.checks.iter().find(|(c, _)| *c == check).map_or(0, |c| c.1)
    }
}

pub const CHECKS: [&str; 6] = [
    "tv_from_expectation",
    "mi_from_tv",
    "accuracy_identity",
    "bhattacharyya_tv",
    "chernoff_chain",
    "multi_session_mi",
];

fn ge(a: f64, b: f64) -> bool {
    a == b || a + ORACLE_TOL * (1.0 + a.abs().max(b.abs())) >= b
}

fn check_channel(idx: usize, settings: &OracleSettings) -> Result<(Vec<usize>, Vec<Violation>)> {
    let mut rng = layer_rng(mix64(settings.seed ^ idx as u64), Layer::Sampler);
    let outputs = rng.random_range(2..=settings.max_outputs.max(2));
    let ch = DiscreteChannel::random(2, outputs, &mut rng);
    let mut counts = vec![0usize; CHECKS.len()];
    let mut bad = Vec::new();
    let mut fail = |check: &'static str, detail: String| {
        bad.push(Violation {
            check,
            channel: idx,
            detail,
        })
    };
    let (p, q) = (ch.row(0).to_vec(), ch.row(1).to_vec());
    let tv = exact_tv(&ch, 0, 1)?;
    let mi = exact_mi(&ch);

    for _ in 0..settings.statistics_per_channel {
        let m = rng.random_range(0.1..10.0);
        let f: Vec<f64> = (0..outputs).map(|_| rng.random_range(-m..=m)).collect();
        let mean = |d: &[f64]| d.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>();
        let delta = (mean(&p) - mean(&q)).abs();
        counts[0] += 1;
        let lb = tv_lower_bound_from_expectation(delta, m);
        if !ge(tv, lb) {
            fail(CHECKS[0], format!("delta/2M = {lb} > TV = {tv}"));
        }
        // ψ = f/M with C = 0 and ρ = 1
        let inputs = BoundInputs {
            delta_bar: delta / m,
            c: 0.0,
            l_phi: 1.0,
            rho: 1.0,
            m: 1.0,
            prior_x: ch.priors()[0],
            prior_x2: ch.priors()[1],
        };
        counts[1] += 1;
        let mi_lb = theorem_mi_lower_bound(&inputs).general_bits;
        if !ge(mi, mi_lb) {
            fail(CHECKS[1], format!("mi_lb = {mi_lb} > I = {mi}"));
        }
    }

    counts[2] += 1;
    let equal = ch.with_priors(vec![0.5, 0.5])?;
    let acc = 1.0 - exact_bayes_error(&equal);
    if (acc - accuracy_from_tv(tv)).abs() > ORACLE_TOL {
        fail(CHECKS[2], format!("1 - Pe = {acc} but (1 + TV)/2 = {}", accuracy_from_tv(tv)));
    }

    let b = bhattacharyya(&p, &q)?;
    counts[3] += 1;
    let hellinger_cap = (1.0 - (-2.0 * b.distance).exp()).sqrt();
    if !ge(hellinger_cap, tv) {
        fail(CHECKS[3], format!("TV = {tv} > sqrt(1 - e^-2B) = {hellinger_cap}"));
    }
    counts[4] += 1;
    let chernoff = exact_chernoff(&p, &q, 1e-10)?.nats();
    let from_tv = chernoff_lower_bound_from_tv(tv);
    if !(ge(chernoff, b.distance) && ge(b.distance, from_tv)) {
        fail(
            CHECKS[4],
            format!("Chernoff {chernoff}, B {}, -0.5 ln(1 - TV^2) {from_tv}", b.distance),
        );
    }

    if outputs <= 4 && idx % 10 == 0 {
        counts[5] += 1;
        let mut prev = 0.0;
        for n in 1..=3 {
            let mi_n = exact_mi(&product_channel(&ch, n, 1 << 12)?);
            if !(ge(mi_n, prev) && ge(n as f64 * mi, mi_n)) {
                fail(CHECKS[5], format!("I_{n} = {mi_n}, I_{} = {prev}, n*I = {}", n - 1, n as f64 * mi));
            }
            prev = mi_n;
        }
    }
    Ok((counts, bad))
}

/// Runs every check on `settings.channels` random two-input channels.
pub fn oracle_suite(settings: OracleSettings) -> Result<OracleSummary> {
    let per: Vec<(Vec<usize>, Vec<Violation>)> = (0..settings.channels)
        .into_par_iter()
        .map(|i| check_channel(i, &settings))
        .collect::<Result<_>>()?;
    let mut totals = vec![0usize; CHECKS.len()];
    let mut violations = Vec::new();
    for (c, v) in per {
        totals.iter_mut().zip(c).for_each(|(t, c)| *t += c);
        violations.extend(v);
    }
    Ok(OracleSummary {
        settings,
        checks: CHECKS.iter().copied().zip(totals).collect(),
        violations,
    })
}
