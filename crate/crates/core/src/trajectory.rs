//! The unified trajectory space: window embeddings, the trajectory metric and
//! the bounded Lipschitz statistics evaluated on it.
//!
//! # Metric
//!
//! Trajectories are compared index by index after time-sorting. Matched
//! packets cost
//!
//! ```text
//! w_len·|ℓ − ℓ'|/S_cap + w_time·|t − t'| + w_dir·[dir ≠ dir']
//! ```
//!
//! and a packet without partner is charged against a phantom packet of
//! length 0 at time T with no direction, plus `w_cnt`:
//!
//! ```text
//! w_cnt + w_len·ℓ/S_cap + w_time·(T − t) + w_dir
//! ```
//!
//! Each coordinate is a metric on packets extended by the phantom, so the sum
//! is a pseudometric and the triangle inequality holds for trajectories of
//! different lengths.
//!
//! # Lipschitz constants
//!
//! | statistic             | bound M | L_φ                                          |
//! |-----------------------|---------|----------------------------------------------|
//! | `clipped_total_bytes` | 1       | `2·S_d / (S_φ·w_len)`                        |
//! | `updown_balance`      | 1       | `1 / w_dir`                                  |
//! | `clipped_mean_gap`    | 1       | `max(2/(G_cap·w_time), 2M/(w_cnt + w_dir))`  |
//!
//! `S_d` is the metric's length normalizer and `S_φ` the statistic's. With the
//! default metric the constants are 2, 20 and 20.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel_ops::{FeatureRecord, MarkedPacketSequence};
use crate::error::{Error, Result};
use crate::traffic::Direction;

/// Default clipping scale of total-byte statistics.
pub const DEFAULT_S_CAP: f64 = 1.0e6;
/// Default clipping scale of mean-gap statistics, seconds.
pub const DEFAULT_G_CAP: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub length: u64,
    pub direction: Direction,
}

/// A packet sequence restricted to `[0, window]`, stripped of its layer.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedTrajectory {
    pub points: Vec<TrajectoryPoint>,
    pub window: f64,
}

impl WindowedTrajectory {
    /// Builds a trajectory from raw points; sorts and truncates them.
    pub fn from_points(mut points: Vec<TrajectoryPoint>, window: f64) -> Self {
        points.retain(|p| p.time >= 0.0 && p.time <= window);
        points.sort_by(|a, b| a.time.total_cmp(&b.time));
        Self { points, window }
    }

    pub fn empty(window: f64) -> Self {
        Self {
            points: Vec::new(),
            window,
        }
    }

    /// Restricts to `[0, window]`.
    pub fn truncate(&self, window: f64) -> Self {
        Self::from_points(self.points.clone(), window)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_bytes(&self) -> u64 {
        self.points.iter().map(|p| p.length).sum()
    }

    pub fn direction_counts(&self) -> (u64, u64) {
        let up = self
            .points
            .iter()
            .filter(|p| p.direction == Direction::Up)
            .count() as u64;
        (up, self.points.len() as u64 - up)
    }

    pub fn mean_gap(&self) -> Option<f64> {
        let n = self.points.len();
        (n >= 2).then(|| (self.points[n - 1].time - self.points[0].time) / (n - 1) as f64)
    }
}

/// Embeds a layer's packet sequence into the unified space.
pub fn embed(pkts: &MarkedPacketSequence, window: f64) -> Result<WindowedTrajectory> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::invalid("window", "must be positive"));
    }
    let points = pkts
        .packets
        .iter()
        .map(|p| TrajectoryPoint {
            time: p.time,
            length: p.length,
            direction: p.direction,
        })
        .collect();
    Ok(WindowedTrajectory::from_points(points, window))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    /// Weight per `s_cap` bytes of length deviation.
    pub w_len: f64,
    /// Weight per unmatched packet.
    pub w_cnt: f64,
    /// Weight per second of timing deviation.
    pub w_time: f64,
    /// Weight per direction mismatch.
    pub w_dir: f64,
    pub s_cap: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            w_len: 1.0,
            w_cnt: 0.05,
            w_time: 0.1,
            w_dir: 0.05,
            s_cap: DEFAULT_S_CAP,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("metric.w_len", self.w_len),
            ("metric.w_cnt", self.w_cnt),
            ("metric.w_time", self.w_time),
            ("metric.w_dir", self.w_dir),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(name, "must be finite and non-negative"));
            }
        }
        if self.w_len + self.w_cnt + self.w_time + self.w_dir == 0.0 {
            return Err(Error::invalid("metric", "all weights are zero"));
        }
        if !(self.s_cap.is_finite() && self.s_cap > 0.0) {
            return Err(Error::invalid("metric.s_cap", "must be positive"));
        }
        Ok(())
    }

    fn matched(&self, a: &TrajectoryPoint, b: &TrajectoryPoint) -> f64 {
        self.w_len * a.length.abs_diff(b.length) as f64 / self.s_cap
            + self.w_time * (a.time - b.time).abs()
            + if a.direction == b.direction { 0.0 } else { self.w_dir }
    }

    fn unmatched(&self, a: &TrajectoryPoint, window: f64) -> f64 {
        self.w_cnt
            + self.w_len * a.length as f64 / self.s_cap
            + self.w_time * (window - a.time).abs()
            + self.w_dir
    }
}

/// Distance between two trajectories over the same window.
pub fn metric_d(a: &WindowedTrajectory, b: &WindowedTrajectory, cfg: &MetricConfig) -> Result<f64> {
    if (a.window - b.window).abs() > 1e-12 * a.window.abs().max(1.0) {
        return Err(Error::invalid(
            "window",
            format!("trajectories over different windows ({} vs {})", a.window, b.window),
        ));
    }
    let m = a.len().min(b.len());
    let matched: f64 = a.points[..m]
        .iter()
        .zip(&b.points[..m])
        .map(|(p, q)| cfg.matched(p, q))
        .sum();
    let rest = if a.len() > m { &a.points[m..] } else { &b.points[m..] };
    let unmatched: f64 = rest.iter().map(|p| cfg.unmatched(p, a.window)).sum();
    Ok(matched + unmatched)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatisticKind {
    /// clip(2·B/s_cap − 1, −M, M) with B the window's total bytes.
    ClippedTotalBytes { s_cap: f64 },
    /// (n_up − n_down)/(n_up + n_down + 1).
    UpdownBalance,
    /// clip(2·ḡ/g_cap − 1, −M, M) with ḡ the mean inter-arrival gap.
    ClippedMeanGap { g_cap: f64 },
}

impl StatisticKind {
    pub const KEYS: [&'static str; 3] = ["clipped_total_bytes", "updown_balance", "clipped_mean_gap"];

    /// Resolves a registry key.
    pub fn from_key(key: &str, s_cap: f64, g_cap: f64) -> Option<Self> {
        match key {
            "clipped_total_bytes" => Some(Self::ClippedTotalBytes { s_cap }),
            "updown_balance" => Some(Self::UpdownBalance),
            "clipped_mean_gap" => Some(Self::ClippedMeanGap { g_cap }),
            _ => None,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Self::ClippedTotalBytes { .. } => "clipped_total_bytes",
            Self::UpdownBalance => "updown_balance",
            Self::ClippedMeanGap { .. } => "clipped_mean_gap",
        }
    }

    /// Shared functional form over (total bytes, up, down, mean gap).
    fn value(&self, bound: f64, bytes: u64, up: u64, down: u64, gap: Option<f64>) -> f64 {
        match *self {
            // an empty window has B = 0, i.e. −1 = −M for the shipped bound
            Self::ClippedTotalBytes { s_cap } => (2.0 * bytes as f64 / s_cap - 1.0).clamp(-bound, bound),
            Self::UpdownBalance => (up as f64 - down as f64) / (up + down + 1) as f64,
            Self::ClippedMeanGap { g_cap } => match gap {
                Some(g) => (2.0 * g / g_cap - 1.0).clamp(-bound, bound),
                None => -bound,
            },
        }
    }
}

/// A bounded statistic on the trajectory space together with its declared
/// Lipschitz constant relative to `metric`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatisticDescriptor {
    pub kind: StatisticKind,
    pub bound: f64,
    pub lipschitz: f64,
    pub metric: MetricConfig,
}

impl StatisticDescriptor {
    /// Descriptor with the analytic Lipschitz constant for `metric`.
    pub fn certified(kind: StatisticKind, metric: MetricConfig) -> Result<Self> {
        metric.validate()?;
        let bound = 1.0;
        let lipschitz = analytic_lipschitz(&kind, bound, &metric)?;
        let desc = Self {
            kind,
            bound,
            lipschitz,
            metric,
        };
        desc.validate()?;
        Ok(desc)
    }

    /// Looks up a registered statistic by key.
    pub fn from_key(key: &str, metric: MetricConfig, g_cap: f64) -> Result<Self> {
        let kind = StatisticKind::from_key(key, metric.s_cap, g_cap).ok_or_else(|| {
            Error::invalid(
                "statistic",
                format!("unknown key `{key}`; known: {}", StatisticKind::KEYS.join(", ")),
            )
        })?;
        Self::certified(kind, metric)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bound.is_finite() && self.bound > 0.0) {
            return Err(Error::invalid("statistic.bound", "must be positive"));
        }
        if !(self.lipschitz.is_finite() && self.lipschitz > 0.0) {
            return Err(Error::invalid("statistic.lipschitz", "must be positive and finite"));
        }
        match self.kind {
            StatisticKind::ClippedTotalBytes { s_cap } if !(s_cap > 0.0) => {
                Err(Error::invalid("statistic.s_cap", "must be positive"))
            }
            StatisticKind::ClippedMeanGap { g_cap } if !(g_cap > 0.0) => {
                Err(Error::invalid("statistic.g_cap", "must be positive"))
            }
            _ => Ok(()),
        }
    }

    pub fn key(&self) -> &'static str {
        self.kind.key()
    }
}

fn analytic_lipschitz(kind: &StatisticKind, bound: f64, m: &MetricConfig) -> Result<f64> {
    let need = |w: f64, name: &str| {
        if w > 0.0 {
            Ok(w)
        } else {
            Err(Error::invalid(
                format!("metric.{name}"),
                format!("must be positive for a finite Lipschitz constant of {}", kind.key()),
            ))
        }
    };
    Ok(match *kind {
        StatisticKind::ClippedTotalBytes { s_cap } => 2.0 * m.s_cap / (s_cap * need(m.w_len, "w_len")?),
        StatisticKind::UpdownBalance => 1.0 / need(m.w_dir, "w_dir")?,
        StatisticKind::ClippedMeanGap { g_cap } => {
            let timing = 2.0 / (g_cap * need(m.w_time, "w_time")?);
            let count = 2.0 * bound / need(m.w_cnt + m.w_dir, "w_cnt")?;
            timing.max(count)
        }
    })
}

/// Evaluates φ(z); the result always lies in `[−M, M]`.
pub fn eval_statistic(desc: &StatisticDescriptor, z: &WindowedTrajectory) -> f64 {
    let (up, down) = z.direction_counts();
    desc.kind
        .value(desc.bound, z.total_bytes(), up, down, z.mean_gap())
}

/// Observation-side statistic ψ: the matched functional form computed from
/// observed window aggregates, divided by the descriptor bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationStatistic {
    pub kind: StatisticKind,
    /// Bound of the matched φ; ψ = form / scale.
    pub scale: f64,
}

impl ObservationStatistic {
    pub fn matching(desc: &StatisticDescriptor) -> Self {
        Self {
            kind: desc.kind,
            scale: desc.bound,
        }
    }
}

/// Evaluates ψ(Y) in `[−1, 1]`.
pub fn eval_observation_statistic(psi: &ObservationStatistic, y: &FeatureRecord) -> Result<f64> {
    let agg = y
        .aggregates
        .as_ref()
        .ok_or(Error::MissingFeature("window aggregates"))?;
    let v = psi.kind.value(
        psi.scale,
        agg.total_bytes,
        agg.up_count,
        agg.down_count,
        agg.mean_inter_arrival,
    );
    Ok((v / psi.scale).clamp(-1.0, 1.0))
}

/// Outcome of an empirical Lipschitz check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzCertificate {
    pub max_ratio: f64,
    pub declared: f64,
    pub pairs: usize,
    pub passes: bool,
}

/// Largest observed |φ(z) − φ(z')| / d(z, z') over sampled pairs. Pairs at
/// distance zero are skipped unless φ separates them, which is an infinite
/// ratio.
pub fn lipschitz_certificate<R, S>(
    desc: &StatisticDescriptor,
    metric: &MetricConfig,
    mut sampler: S,
    rng: &mut R,
    trials: usize,
) -> Result<LipschitzCertificate>
where
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> (WindowedTrajectory, WindowedTrajectory),
{
    let mut max_ratio = 0.0f64;
    let mut pairs = 0;
    for _ in 0..trials {
        let (a, b) = sampler(rng);
        let d = metric_d(&a, &b, metric)?;
        let gap = (eval_statistic(desc, &a) - eval_statistic(desc, &b)).abs();
        if d > 0.0 {
            max_ratio = max_ratio.max(gap / d);
            pairs += 1;
        } else if gap > 0.0 {
            max_ratio = f64::INFINITY;
            pairs += 1;
        }
    }
    if pairs == 0 {
        return Err(Error::DegenerateSample(
            "sampler produced only identical pairs".into(),
        ));
    }
    Ok(LipschitzCertificate {
        max_ratio,
        declared: desc.lipschitz,
        pairs,
        passes: max_ratio <= desc.lipschitz * (1.0 + 1e-9),
    })
}

/// Random trajectory generator used by certificates and property tests:
/// a base trajectory plus a random local perturbation of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSampler {
    pub window: f64,
    pub max_packets: usize,
    pub max_length: u64,
}

impl Default for PerturbationSampler {
    fn default() -> Self {
        Self {
            window: 10.0,
            max_packets: 40,
            max_length: 1500,
        }
    }
}

impl PerturbationSampler {
    pub fn trajectory<R: Rng + ?Sized>(&self, rng: &mut R) -> WindowedTrajectory {
        let n = rng.random_range(0..=self.max_packets);
        let points = (0..n).map(|_| self.point(rng)).collect();
        WindowedTrajectory::from_points(points, self.window)
    }

    fn point<R: Rng + ?Sized>(&self, rng: &mut R) -> TrajectoryPoint {
        TrajectoryPoint {
            time: rng.random::<f64>() * self.window,
            length: rng.random_range(1..=self.max_length),
            direction: if rng.random() { Direction::Up } else { Direction::Down },
        }
    }

    /// Applies 1..=3 random edits: length change, time shift, direction flip,
    /// insertion or deletion.
    pub fn perturb<R: Rng + ?Sized>(&self, z: &WindowedTrajectory, rng: &mut R) -> WindowedTrajectory {
        let mut pts = z.points.clone();
        for _ in 0..rng.random_range(1..=3) {
            let op = rng.random_range(0..5);
            if pts.is_empty() || op == 3 {
                pts.push(self.point(rng));
                continue;
            }
            let i = rng.random_range(0..pts.len());
            match op {
                0 => {
                    let delta = rng.random_range(1..=self.max_length);
                    pts[i].length = if rng.random() {
                        pts[i].length + delta
                    } else {
                        pts[i].length.saturating_sub(delta).max(1)
                    };
                }
                1 => {
                    let dt = (rng.random::<f64>() - 0.5) * 0.01 * self.window;
                    pts[i].time = (pts[i].time + dt).clamp(0.0, self.window);
                }
                2 => {
                    pts[i].direction = match pts[i].direction {
                        Direction::Up => Direction::Down,
                        Direction::Down => Direction::Up,
                    }
                }
                _ => {
                    pts.remove(i);
                }
            }
        }
        WindowedTrajectory::from_points(pts, self.window)
    }

    pub fn pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (WindowedTrajectory, WindowedTrajectory) {
        let a = self.trajectory(rng);
        let b = if rng.random_range(0..4) == 0 {
            self.trajectory(rng)
        } else {
            self.perturb(&a, rng)
        };
        (a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_ops::{LayerTag, Packet, Provenance};
    use crate::rng::{layer_rng, Layer};

    fn pt(time: f64, length: u64, direction: Direction) -> TrajectoryPoint {
        TrajectoryPoint {
            time,
            length,
            direction,
        }
    }

    fn seq(packets: Vec<Packet>) -> MarkedPacketSequence {
        MarkedPacketSequence {
            packets,
            layer: LayerTag::Arrival,
            window: 10.0,
            provenance: Provenance { label: 0, seed: 0 },
        }
    }

    #[test]
    fn embed_truncates_at_window() {
        let s = seq(vec![
            Packet::new(1.0, 100, Direction::Up),
            Packet::new(10.0, 100, Direction::Up),
            Packet::new(10.0 + 1e-9, 100, Direction::Up),
        ]);
        let z = embed(&s, 10.0).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(embed(&seq(vec![]), 10.0).unwrap().len(), 0);
        assert!(embed(&s, 0.0).is_err());
        assert_eq!(z.truncate(10.0), z);
    }

    #[test]
    fn metric_identity_and_unit_length() {
        let z = WindowedTrajectory::from_points(vec![pt(1.0, 100, Direction::Up), pt(2.0, 50, Direction::Down)], 10.0);
        let m = MetricConfig::default();
        assert_eq!(metric_d(&z, &z, &m).unwrap(), 0.0);
        let mut z2 = z.clone();
        z2.points[0].length += m.s_cap as u64;
        assert_eq!(metric_d(&z, &z2, &m).unwrap(), 1.0);
    }

    #[test]
    fn metric_unmatched_packet_cost() {
        let m = MetricConfig::default();
        let z = WindowedTrajectory::from_points(vec![pt(4.0, 1000, Direction::Up)], 10.0);
        let e = WindowedTrajectory::empty(10.0);
        let want = 0.05 + 1000.0 / 1e6 + 0.1 * 6.0 + 0.05;
        assert!((metric_d(&z, &e, &m).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn metric_window_mismatch() {
        let m = MetricConfig::default();
        assert!(metric_d(&WindowedTrajectory::empty(10.0), &WindowedTrajectory::empty(5.0), &m).is_err());
    }

    #[test]
    fn statistic_closed_forms() {
        let m = MetricConfig::default();
        let ctb = StatisticDescriptor::from_key("clipped_total_bytes", m, DEFAULT_G_CAP).unwrap();
        let half = WindowedTrajectory::from_points(vec![pt(1.0, 500_000, Direction::Up)], 10.0);
        assert_eq!(eval_statistic(&ctb, &half), 0.0);
        let big = WindowedTrajectory::from_points(vec![pt(1.0, 2_000_000, Direction::Up)], 10.0);
        assert_eq!(eval_statistic(&ctb, &big), 1.0);
        assert_eq!(eval_statistic(&ctb, &WindowedTrajectory::empty(10.0)), -1.0);

        let ud = StatisticDescriptor::from_key("updown_balance", m, DEFAULT_G_CAP).unwrap();
        let ups = WindowedTrajectory::from_points((0..7).map(|i| pt(i as f64, 10, Direction::Up)).collect(), 10.0);
        assert!((eval_statistic(&ud, &ups) - 7.0 / 8.0).abs() < 1e-15);
        assert_eq!(eval_statistic(&ud, &WindowedTrajectory::empty(10.0)), 0.0);

        let gap = StatisticDescriptor::from_key("clipped_mean_gap", m, DEFAULT_G_CAP).unwrap();
        let two = WindowedTrajectory::from_points(vec![pt(1.0, 1, Direction::Up), pt(1.5, 1, Direction::Up)], 10.0);
        assert_eq!(eval_statistic(&gap, &two), 0.0);
        assert_eq!(eval_statistic(&gap, &WindowedTrajectory::empty(10.0)), -1.0);
    }

    #[test]
    fn default_lipschitz_constants() {
        let m = MetricConfig::default();
        let l = |k| StatisticDescriptor::from_key(k, m, DEFAULT_G_CAP).unwrap().lipschitz;
        assert!((l("clipped_total_bytes") - 2.0).abs() < 1e-12);
        assert!((l("updown_balance") - 20.0).abs() < 1e-12);
        assert!((l("clipped_mean_gap") - 20.0).abs() < 1e-12);
        assert!(StatisticDescriptor::from_key("nope", m, 1.0).is_err());
        let no_len = MetricConfig { w_len: 0.0, ..m };
        assert!(StatisticDescriptor::from_key("clipped_total_bytes", no_len, 1.0).is_err());
    }

    #[test]
    fn understated_constant_fails_on_single_length_edit() {
        let m = MetricConfig::default();
        let mut desc = StatisticDescriptor::from_key("clipped_total_bytes", m, 1.0).unwrap();
        desc.lipschitz /= 2.0;
        let mut rng = layer_rng(1, Layer::Sampler);
        let base = WindowedTrajectory::from_points(vec![pt(1.0, 1000, Direction::Up)], 10.0);
        let cert = lipschitz_certificate(
            &desc,
            &m,
            |_| {
                let mut b = base.clone();
                b.points[0].length += 500;
                (base.clone(), b)
            },
            &mut rng,
            1,
        )
        .unwrap();
        assert!((cert.max_ratio - 2.0).abs() < 1e-9);
        assert!(!cert.passes);
    }

    #[test]
    fn saturated_statistic_has_zero_ratio() {
        let m = MetricConfig::default();
        let desc = StatisticDescriptor::from_key("clipped_total_bytes", m, 1.0).unwrap();
        let mut rng = layer_rng(2, Layer::Sampler);
        let cert = lipschitz_certificate(
            &desc,
            &m,
            |r: &mut rand_chacha::ChaCha8Rng| {
                let a = WindowedTrajectory::from_points(vec![pt(1.0, 3_000_000, Direction::Up)], 10.0);
                let b = WindowedTrajectory::from_points(
                    vec![pt(r.random::<f64>() * 5.0, 2_000_000 + r.random_range(0..1000), Direction::Down)],
                    10.0,
                );
                (a, b)
            },
            &mut rng,
            100,
        )
        .unwrap();
        assert_eq!(cert.max_ratio, 0.0);
        assert!(cert.passes);
    }

    #[test]
    fn identical_pairs_are_degenerate() {
        let m = MetricConfig::default();
        let desc = StatisticDescriptor::from_key("updown_balance", m, 1.0).unwrap();
        let mut rng = layer_rng(2, Layer::Sampler);
        let z = WindowedTrajectory::from_points(vec![pt(1.0, 1, Direction::Up)], 10.0);
        let err = lipschitz_certificate(&desc, &m, |_| (z.clone(), z.clone()), &mut rng, 10).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)));
    }

    #[test]
    fn observation_statistic_requires_aggregates() {
        let psi = ObservationStatistic {
            kind: StatisticKind::UpdownBalance,
            scale: 1.0,
        };
        let y = FeatureRecord {
            packets: Some(vec![]),
            aggregates: None,
        };
        let err = eval_observation_statistic(&psi, &y).unwrap_err();
        assert!(err.to_string().contains("aggregates"));
    }
}
