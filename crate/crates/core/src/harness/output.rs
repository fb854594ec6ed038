//! Table and text renderers for every experiment. Column names are stable.

use std::fmt::Write as _;

use crate::bounds::LeakageReport;
use crate::channel_ops::{ChainOutput, MarkedPacketSequence};
use crate::error::Result;
use crate::estimators::{ChainBundle, PairEstimate, RhoEstimate};

use super::defense::{pad_label, SweepOutcome};
use super::multisession::{OracleSessionRow, SessionRow};
use super::oracle::OracleSummary;
use super::scenario::{DpiSeries, ExperimentResult};

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn f(v: f64) -> String {
    v.to_string()
}

/// Scenario names may hold commas or quotes.
fn text_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const ESTIMATE_COLUMNS: [&str; 20] = [
    "scenario",
    "seed",
    "trials",
    "bins",
    "label_a",
    "label_b",
    "est_delta_bar",
    "est_delta_bar_lo",
    "est_delta_bar_hi",
    "est_c",
    "est_c_lo",
    "est_c_hi",
    "rho_identified",
    "est_rho",
    "est_rho_lo",
    "est_rho_hi",
    "empirical_tv",
    "empirical_mi_lo_bits",
    "empirical_mi_hi_bits",
    "empirical_accuracy",
];

const TAIL_COLUMNS: [&str; 3] = ["empirical_accuracy_lo", "empirical_accuracy_hi", "soundness_violations"];

fn rho_parts(rho: &RhoEstimate) -> [String; 4] {
    match rho {
        RhoEstimate::Identified(e) => ["true".into(), f(e.point), f(e.lo), f(e.hi)],
        RhoEstimate::Unidentifiable { .. } => ["false".into(), String::new(), String::new(), String::new()],
    }
}

fn estimate_parts(e: &PairEstimate) -> [String; 3] {
    [f(e.point), f(e.lo), f(e.hi)]
}

/// Column names of [`result_csv`].
pub fn result_columns() -> Vec<&'static str> {
    ESTIMATE_COLUMNS
        .iter()
        .chain(&TAIL_COLUMNS)
        .chain(&LeakageReport::CSV_COLUMNS)
        .copied()
        .collect()
}

fn result_row(r: &ExperimentResult) -> Vec<String> {
    let mut row = vec![
        text_field(&r.scenario),
        r.seed.to_string(),
        r.trials.to_string(),
        r.bins.to_string(),
        r.pair.0.to_string(),
        r.pair.1.to_string(),
    ];
    row.extend(estimate_parts(&r.delta_bar));
    row.extend(estimate_parts(&r.c));
    row.extend(rho_parts(&r.rho));
    row.extend([
        f(r.empirical_tv),
        f(r.empirical_mi.lo),
        f(r.empirical_mi.hi),
        f(r.accuracy.accuracy),
        f(r.accuracy.lo),
        f(r.accuracy.hi),
        r.soundness.violations().to_string(),
    ]);
    row.extend(r.report.csv_row().split(',').map(str::to_string));
    row
}

/// `result.csv`: estimates with intervals, empirical quantities and the
/// report columns.
pub fn result_csv(r: &ExperimentResult) -> String {
    csv(&result_columns(), &[result_row(r)])
}

/// `report.txt`: the report block followed by estimates and empirical values.
pub fn report_text(r: &ExperimentResult) -> String {
    let mut s = r.report.structured();
    s.push_str("\n[estimates]\n");
    let est = |s: &mut String, name: &str, e: &PairEstimate| {
        writeln!(s, "{name} = {}  # 99% CI [{}, {}]", e.point, e.lo, e.hi).unwrap();
    };
    est(&mut s, "delta_bar", &r.delta_bar);
    est(&mut s, "c", &r.c);
    match &r.rho {
        RhoEstimate::Identified(e) => est(&mut s, "rho", e),
        RhoEstimate::Unidentifiable { denominator } => writeln!(
            s,
            "rho = unidentifiable  # arrival-layer gap CI [{}, {}] contains 0",
            denominator.lo, denominator.hi
        )
        .unwrap(),
    }
    s.push_str("\n[empirical]\n");
    writeln!(s, "tv = {}  # probability", r.empirical_tv).unwrap();
    writeln!(
        s,
        "mi_bits = {}  # 99% CI [{}, {}]",
        r.empirical_mi.bits, r.empirical_mi.lo, r.empirical_mi.hi
    )
    .unwrap();
    writeln!(
        s,
        "accuracy = {}  # 99% CI [{}, {}], {} held-out sessions",
        r.accuracy.accuracy, r.accuracy.lo, r.accuracy.hi, r.accuracy.n_test
    )
    .unwrap();
    writeln!(s, "soundness_violations = {}", r.soundness.violations()).unwrap();
    s.push_str("\n[run]\n");
    writeln!(s, "scenario = {}\nseed = {}\ntrials = {}\nbins = {}", r.scenario, r.seed, r.trials, r.bins).unwrap();
    s
}

pub fn dpi_csv(series: &DpiSeries) -> String {
    let rows: Vec<Vec<String>> = series
        .layers
        .iter()
        .map(|l| vec![l.layer.to_string(), f(l.mi.bits), f(l.mi.lo), f(l.mi.hi)])
        .collect();
    let mut s = csv(&["layer", "mi_bits", "mi_lo_bits", "mi_hi_bits"], &rows);
    writeln!(s, "# nonincreasing,{}", series.nonincreasing).unwrap();
    s
}

/// `pareto.csv`: one row per grid point.
pub fn pareto_csv(o: &SweepOutcome) -> String {
    let rows: Vec<Vec<String>> = o
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let r = &p.result;
            vec![
                i.to_string(),
                pad_label(p.defense.pad),
                f(p.defense.added_delay_s),
                f(p.defense.cover_rate),
                f(p.efficiency.bandwidth_overhead),
                f(p.efficiency.added_latency_s),
                f(p.efficiency.throughput_ratio),
                f(r.inputs.delta_bar),
                f(r.inputs.c),
                f(r.inputs.rho),
                r.report.condition_v_ok.to_string(),
                f(r.report.mi_lb_bits),
                f(r.empirical_mi.bits),
                f(r.report.acc_lb),
                f(r.accuracy.accuracy),
                p.feasible.to_string(),
                p.pareto.to_string(),
                (o.optimal == Some(i)).to_string(),
                (o.nearest_infeasible == Some(i)).to_string(),
            ]
        })
        .collect();
    csv(
        &[
            "point",
            "pad",
            "added_delay_s",
            "cover_rate",
            "bandwidth_overhead",
            "added_latency_s",
            "throughput_ratio",
            "delta_bar_lo",
            "c_hi",
            "rho_lo",
            "condition_v_ok",
            "mi_lb_bits",
            "empirical_mi_bits",
            "acc_lb",
            "empirical_accuracy",
            "feasible",
            "pareto",
            "optimal",
            "nearest_infeasible",
        ],
        &rows,
    )
}

pub fn sessions_csv(rows: &[SessionRow]) -> String {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.sessions.to_string(),
                f(r.accuracy.accuracy),
                f(r.accuracy.lo),
                f(r.accuracy.hi),
                r.accuracy.n_test.to_string(),
                f(r.pe_envelope),
                f(r.mi_envelope_bits),
            ]
        })
        .collect();
    csv(
        &[
            "sessions",
            "accuracy",
            "accuracy_lo",
            "accuracy_hi",
            "n_test",
            "pe_envelope",
            "mi_envelope_bits",
        ],
        &rows,
    )
}

pub fn oracle_sessions_csv(rows: &[OracleSessionRow]) -> String {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.sessions.to_string(),
                f(r.bayes_error),
                f(r.exponent_nats),
                f(r.chernoff_nats),
            ]
        })
        .collect();
    csv(&["sessions", "bayes_error", "exponent_nats", "chernoff_nats"], &rows)
}

pub fn oracle_csv(s: &OracleSummary) -> String {
    let rows: Vec<Vec<String>> = s
        .checks
        .iter()
        .map(|(c, n)| {
            let bad = s.violations.iter().filter(|v| v.check == *c).count();
            vec![c.to_string(), n.to_string(), bad.to_string()]
        })
        .collect();
    csv(&["check", "instances", "violations"], &rows)
}

const LAYER_COLUMNS: [&str; 8] = ["label", "trial", "layer", "index", "time", "length", "direction", "cover"];

fn dump_sequence(rows: &mut Vec<Vec<String>>, label: &str, trial: u64, seq: &MarkedPacketSequence) {
    for (i, p) in seq.packets.iter().enumerate() {
        rows.push(vec![
            text_field(label),
            trial.to_string(),
            seq.layer.as_str().to_string(),
            i.to_string(),
            f(p.time),
            p.length.to_string(),
            p.direction.to_string(),
            p.cover.to_string(),
        ]);
    }
}

fn dump_output(rows: &mut Vec<Vec<String>>, label: &str, trial: u64, out: &ChainOutput) {
    for (i, m) in out.messages.events.iter().enumerate() {
        rows.push(vec![
            text_field(label),
            trial.to_string(),
            "application".into(),
            i.to_string(),
            f(m.time),
            m.size.to_string(),
            m.direction.to_string(),
            "false".into(),
        ]);
    }
    dump_sequence(rows, label, trial, &out.plaintext);
    dump_sequence(rows, label, trial, &out.ciphertext);
    dump_sequence(rows, label, trial, &out.arrival);
    if let Some(pkts) = &out.features.packets {
        for (i, p) in pkts.iter().enumerate() {
            rows.push(vec![
                text_field(label),
                trial.to_string(),
                "observation".into(),
                i.to_string(),
                p.time.map_or_else(String::new, f),
                p.length.map_or_else(String::new, |l| l.to_string()),
                p.direction.map_or_else(String::new, |d| d.to_string()),
                String::new(),
            ]);
        }
    }
}

/// `layers.csv`: every layer of the first `trials` trials of each label.
/// Trial numbers are per label; re-running a trial reproduces it exactly.
pub fn layers_csv(bundle: &ChainBundle, trials: usize) -> Result<String> {
    let mut rows = Vec::new();
    for (l, label) in bundle.labels.iter().enumerate() {
        for t in 0..trials as u64 {
            let out = bundle.run(l, t)?;
            dump_output(&mut rows, &label.name, t, &out);
        }
    }
    Ok(csv(&LAYER_COLUMNS, &rows))
}
