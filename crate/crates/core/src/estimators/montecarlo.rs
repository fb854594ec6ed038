//! Monte Carlo estimation of Δ̄, C and ρ on matched seeds.
//!
//! Trial `i` of label `x` runs the whole chain on the seed
//! [`trial_seed`]`(master, x, i)`, so the plaintext trajectory, the arrival
//! trajectory and the feature record of one trial all describe the same
//! session, and two bundles sharing a master seed see the same sessions.

use rayon::prelude::*;

use crate::channel_ops::{run_chain, ChainConfig, ChainOutput};
use crate::error::{Error, Result};
use crate::estimators::Z99;
use crate::rng::trial_seed;
use crate::trajectory::{
    embed, eval_observation_statistic, eval_statistic, metric_d, MetricConfig, ObservationStatistic,
    StatisticDescriptor,
};
use crate::traffic::{SemanticLabel, TrafficProfile};

/// Point estimate with a 99% normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    /// Samples per label.
    pub n: usize,
    /// Trial indices used, half-open.
    pub seeds: (u64, u64),
    /// Both groups constant and equal: the gap is exactly zero.
    pub degenerate: bool,
}

impl PairEstimate {
    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

fn mean_var(v: &[f64]) -> (f64, f64) {
    if v.iter().all(|x| *x == v[0]) {
        return (v[0], 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Mean of `v` with its interval.
pub fn mean_estimate(v: &[f64]) -> Result<PairEstimate> {
    if v.is_empty() {
        return Err(Error::invalid("samples", "empty"));
    }
    let (m, var) = mean_var(v);
    let h = Z99 * (var / v.len() as f64).sqrt();
    Ok(PairEstimate {
        point: m,
        lo: m - h,
        hi: m + h,
        n: v.len(),
        seeds: (0, v.len() as u64),
        degenerate: var == 0.0,
    })
}

/// |mean(xs) − mean(ys)| from independent samples. The interval is the image
/// of the signed-gap interval under |·|.
pub fn gap_estimate(xs: &[f64], ys: &[f64]) -> Result<PairEstimate> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("samples", "both groups must be non-empty"));
    }
    let (mx, vx) = mean_var(xs);
    let (my, vy) = mean_var(ys);
    let g = mx - my;
    let h = Z99 * (vx / xs.len() as f64 + vy / ys.len() as f64).sqrt();
    let (a, b) = (g - h, g + h);
    let (lo, hi) = if a <= 0.0 && b >= 0.0 {
        (0.0, a.abs().max(b.abs()))
    } else {
        (a.abs().min(b.abs()), a.abs().max(b.abs()))
    };
    Ok(PairEstimate {
        point: g.abs(),
        lo,
        hi,
        n: xs.len().min(ys.len()),
        seeds: (0, xs.len().max(ys.len()) as u64),
        degenerate: vx == 0.0 && vy == 0.0 && g == 0.0,
    })
}

/// Labels, their traffic profiles and the chain they share.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainBundle {
    pub labels: Vec<SemanticLabel>,
    pub profiles: Vec<TrafficProfile>,
    pub chain: ChainConfig,
    pub window: f64,
    pub metric: MetricConfig,
    pub phi: StatisticDescriptor,
    pub psi: ObservationStatistic,
    pub master_seed: u64,
}

impl ChainBundle {
    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.profiles.len() {
            return Err(Error::invalid("profiles", "one profile per label required"));
        }
        self.chain.validate()?;
        self.metric.validate()?;
        self.phi.validate()?;
        for p in &self.profiles {
            p.validate()?;
        }
        Ok(())
    }

    /// Runs the chain for trial `trial` of label index `label`.
    pub fn run(&self, label: usize, trial: u64) -> Result<ChainOutput> {
        let l = &self.labels[label];
        run_chain(
            l,
            &self.profiles[label],
            &self.chain,
            self.window,
            trial_seed(self.master_seed, l.id, trial),
        )
    }
}

/// Per-trial scalars needed by every estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    /// φ(e_P(Ξ_P|[0,T])).
    pub phi_plain: f64,
    /// φ(e_N(Ξ_N|[0,T])).
    pub phi_arrival: f64,
    /// ψ(Y).
    pub psi: f64,
    /// d(z_P, z_N).
    pub distance: f64,
    /// Arrival-layer bytes and packets, cover included.
    pub wire_bytes: u64,
    /// Mean arrival time of non-cover packets.
    pub mean_arrival: f64,
}

fn record(bundle: &ChainBundle, out: &ChainOutput) -> Result<TrialRecord> {
    let zp = embed(&out.plaintext, bundle.window)?;
    let zn = embed(&out.arrival, bundle.window)?;
    let real: Vec<f64> = out
        .arrival
        .packets
        .iter()
        .filter(|p| !p.cover)
        .map(|p| p.time)
        .collect();
    Ok(TrialRecord {
        seed: out.plaintext.provenance.seed,
        phi_plain: eval_statistic(&bundle.phi, &zp),
        phi_arrival: eval_statistic(&bundle.phi, &zn),
        psi: eval_observation_statistic(&bundle.psi, &out.features)?,
        distance: metric_d(&zp, &zn, &bundle.metric)?,
        wire_bytes: out.arrival.total_bytes(),
        mean_arrival: if real.is_empty() {
            0.0
        } else {
            real.iter().sum::<f64>() / real.len() as f64
        },
    })
}

/// `n` simulated trials per label.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub per_label: Vec<Vec<TrialRecord>>,
    pub trials: usize,
}

impl TrialSet {
    /// Simulates in parallel. Results are collected in trial order, so the
    /// set does not depend on the number of worker threads.
    pub fn simulate(bundle: &ChainBundle, trials: usize) -> Result<Self> {
        bundle.validate()?;
        let per_label = (0..bundle.labels.len())
            .map(|l| {
                (0..trials as u64)
                    .into_par_iter()
                    .map(|i| bundle.run(l, i).and_then(|o| record(bundle, &o)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { per_label, trials })
    }

    pub fn column(&self, label: usize, f: impl Fn(&TrialRecord) -> f64) -> Vec<f64> {
        self.per_label[label].iter().map(f).collect()
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.per_label.len() || b >= self.per_label.len() {
            return Err(Error::invalid("pair", format!("invalid label pair ({a}, {b})")));
        }
        Ok(())
    }
}

/// Δ̄: protocol-layer expectation gap of φ between two labels.
pub fn estimate_delta_bar(set: &TrialSet, a: usize, b: usize) -> Result<PairEstimate> {
    set.check_pair(a, b)?;
    gap_estimate(&set.column(a, |r| r.phi_plain), &set.column(b, |r| r.phi_plain))
}

/// C: the largest per-label mean of d(z_P, z_N).
pub fn estimate_c(set: &TrialSet, labels: &[usize]) -> Result<PairEstimate> {
    let mut best: Option<PairEstimate> = None;
    for &l in labels {
        if l >= set.per_label.len() {
            return Err(Error::invalid("labels", format!("no label {l}")));
        }
        let e = mean_estimate(&set.column(l, |r| r.distance))?;
        best = Some(match best {
            None => e,
            Some(b) => PairEstimate {
                point: b.point.max(e.point),
                lo: b.lo.max(e.lo),
                hi: b.hi.max(e.hi),
                degenerate: b.degenerate && e.degenerate,
                ..b
            },
        });
    }
    let mut e = best.ok_or_else(|| Error::invalid("labels", "empty label set"))?;
    e.lo = e.lo.max(0.0);
    Ok(e)
}

/// Outcome of ρ estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoEstimate {
    Identified(PairEstimate),
    /// The arrival-layer gap is not distinguishable from zero.
    Unidentifiable { denominator: PairEstimate },
}

impl RhoEstimate {
    pub fn estimate(&self) -> Option<&PairEstimate> {
        match self {
            RhoEstimate::Identified(e) => Some(e),
            RhoEstimate::Unidentifiable { .. } => None,
        }
    }
}

/// ρ = |E[ψ|a] − E[ψ|b]| / |E[φ(z_N)|a] − E[φ(z_N)|b]| on matched trials,
/// clipped to [0, 1]. The interval is the delta-method interval of the ratio.
pub fn estimate_rho(set: &TrialSet, a: usize, b: usize) -> Result<RhoEstimate> {
    set.check_pair(a, b)?;
    let (pa, pb) = (set.column(a, |r| r.phi_arrival), set.column(b, |r| r.phi_arrival));
    let denominator = gap_estimate(&pa, &pb)?;
    if denominator.contains_zero() || denominator.point == 0.0 {
        return Ok(RhoEstimate::Unidentifiable { denominator });
    }
    let (sa, sb) = (set.column(a, |r| r.psi), set.column(b, |r| r.psi));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let den = mean(&pa) - mean(&pb);
    let num = mean(&sa) - mean(&sb);
    let ratio = num / den;
    let resid_var = |s: &[f64], p: &[f64]| {
        let u: Vec<f64> = s.iter().zip(p).map(|(x, y)| x - ratio * y).collect();
        mean_var(&u).1 / u.len() as f64
    };
    let se = (resid_var(&sa, &pa) + resid_var(&sb, &pb)).sqrt() / den.abs();
    let point = ratio.abs();
    Ok(RhoEstimate::Identified(PairEstimate {
        point: point.min(1.0),
        lo: (point - Z99 * se).clamp(0.0, 1.0),
        hi: (point + Z99 * se).clamp(0.0, 1.0),
        n: sa.len().min(sb.len()),
        seeds: (0, set.trials as u64),
        degenerate: num == 0.0,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructed_extremes_give_gap_two() {
        let e = gap_estimate(&[1.0; 200], &[-1.0; 200]).unwrap();
        assert_eq!(e.point, 2.0);
        assert_eq!((e.lo, e.hi), (2.0, 2.0));
        assert!(!e.degenerate);
        let z = gap_estimate(&[0.3; 10], &[0.3; 10]).unwrap();
        assert!(z.degenerate && z.contains_zero());
    }

    #[test]
    fn gap_interval_folds_at_zero() {
        let e = gap_estimate(&[0.0, 1.0, 0.0, 1.0], &[0.5, 0.5, 0.4, 0.6]).unwrap();
        assert_eq!(e.lo, 0.0);
        assert!(e.hi > e.point);
    }
}
