use crate::channel_ops::{DefenseParams, PadPolicy};
use crate::error::{Error, Result};
use crate::estimators::TrialSet;

use super::config::{Objective, ScenarioConfig};
use super::scenario::{evaluate, ExperimentResult};

/// Cost of a defense relative to the undefended run on matched seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyMetrics {
    /// Extra wire bytes over baseline wire bytes, floored at 0.
    pub bandwidth_overhead: f64,
    /// Mean shift of real-packet arrival times, seconds.
    pub added_latency_s: f64,
    /// Baseline bytes over defended bytes.
    pub throughput_ratio: f64,
}

pub fn efficiency(base: &TrialSet, defended: &TrialSet) -> EfficiencyMetrics {
    let (mut b_bytes, mut d_bytes, mut shift, mut n) = (0.0, 0.0, 0.0, 0usize);
    for (bl, dl) in base.per_label.iter().zip(&defended.per_label) {
        for (b, d) in bl.iter().zip(dl) {
            b_bytes += b.wire_bytes as f64;
            d_bytes += d.wire_bytes as f64;
            shift += d.mean_arrival - b.mean_arrival;
            n += 1;
        }
    }
    let n = n.max(1) as f64;
    EfficiencyMetrics {
        bandwidth_overhead: if b_bytes > 0.0 {
            ((d_bytes - b_bytes) / b_bytes).max(0.0)
        } else {
            0.0
        },
        added_latency_s: shift / n,
        throughput_ratio: if d_bytes > 0.0 { b_bytes / d_bytes } else { 1.0 },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub defense: DefenseParams,
    pub efficiency: EfficiencyMetrics,
    pub result: ExperimentResult,
    pub feasible: bool,
    pub pareto: bool,
}

impl SweepPoint {
    pub fn objective(&self, obj: Objective) -> f64 {
        match obj {
            Objective::EmpiricalMi => self.result.empirical_mi.bits,
            Objective::Bound => self.result.report.mi_lb_bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub objective: Objective,
    pub max_overhead: f64,
    pub max_latency_s: f64,
    /// Index of the feasible point with the smallest objective.
    pub optimal: Option<usize>,
    /// With no feasible point: the point with the smallest constraint excess.
    pub nearest_infeasible: Option<usize>,
}

pub fn feasible(e: &EfficiencyMetrics, max_overhead: f64, max_latency_s: f64) -> bool {
    e.bandwidth_overhead <= max_overhead && e.added_latency_s <= max_latency_s
}

/// Runs the scenario once per grid point on the seeds of the undefended run.
pub fn defense_sweep(base: &ScenarioConfig) -> Result<SweepOutcome> {
    base.validate()?;
    let grid = &base.sweep.grid;
    if grid.is_empty() {
        return Err(Error::invalid("sweep.grid", "must not be empty"));
    }
    let baseline_cfg = base.with_defense(DefenseParams::none());
    let baseline = TrialSet::simulate(&baseline_cfg.bundle()?, base.trials)?;
    let mut points = Vec::with_capacity(grid.len());
    for theta in grid {
        let cfg = base.with_defense(*theta);
        let set = if theta.is_none() {
            baseline.clone()
        } else {
            TrialSet::simulate(&cfg.bundle()?, base.trials)?
        };
        let efficiency = efficiency(&baseline, &set);
        points.push(SweepPoint {
            defense: *theta,
            feasible: feasible(&efficiency, base.sweep.max_overhead, base.sweep.max_latency_s),
            efficiency,
            result: evaluate(&cfg, &set)?,
            pareto: false,
        });
    }
    mark_pareto(&mut points, base.objective);
    Ok(summarize(points, base.objective, base.sweep.max_overhead, base.sweep.max_latency_s))
}

/// Re-evaluates feasibility of swept points under other constraints.
pub fn summarize(
    mut points: Vec<SweepPoint>,
    objective: Objective,
    max_overhead: f64,
    max_latency_s: f64,
) -> SweepOutcome {
    for p in &mut points {
        p.feasible = feasible(&p.efficiency, max_overhead, max_latency_s);
    }
    let optimal = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.feasible)
        .min_by(|a, b| a.1.objective(objective).total_cmp(&b.1.objective(objective)))
        .map(|(i, _)| i);
    let nearest_infeasible = if optimal.is_none() {
        let excess = |p: &SweepPoint| {
            (p.efficiency.bandwidth_overhead - max_overhead).max(0.0)
                + (p.efficiency.added_latency_s - max_latency_s).max(0.0)
        };
        points
            .iter()
            .enumerate()
            .min_by(|a, b| excess(a.1).total_cmp(&excess(b.1)))
            .map(|(i, _)| i)
    } else {
        None
    };
    SweepOutcome {
        points,
        objective,
        max_overhead,
        max_latency_s,
        optimal,
        nearest_infeasible,
    }
}

fn mark_pareto(points: &mut [SweepPoint], objective: Objective) {
    let key = |p: &SweepPoint| {
        [
            p.efficiency.bandwidth_overhead,
            p.efficiency.added_latency_s,
            p.objective(objective),
        ]
    };
    let keys: Vec<[f64; 3]> = points.iter().map(key).collect();
    for (i, p) in points.iter_mut().enumerate() {
        p.pareto = !keys.iter().enumerate().any(|(j, k)| {
            j != i && k.iter().zip(&keys[i]).all(|(a, b)| a <= b) && k.iter().zip(&keys[i]).any(|(a, b)| a < b)
        });
    }
}

/// Short description of a pad override for tables.
pub fn pad_label(pad: Option<PadPolicy>) -> String {
    match pad {
        None => "inherit".into(),
        Some(PadPolicy::None) => "none".into(),
        Some(PadPolicy::PadToBlock) => "pad-to-block".into(),
        Some(PadPolicy::PadToFixed { target }) => format!("pad-to-fixed:{target}"),
        Some(PadPolicy::RandomPad { max_extra }) => format!("random-pad:{max_extra}"),
    }
}
