use crate::bounds::multi_session_projection;
use crate::error::{Error, Result};
use crate::estimators::{
    bayes_accuracy_weighted, exact_bayes_error, exact_chernoff, product_channel, AccuracyEstimate,
    DiscreteChannel, TrialSet, DEFAULT_PRODUCT_CAP,
};

use super::config::{OracleSpec, ScenarioConfig};
use super::scenario::{bins_for, evaluate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionRow {
    pub sessions: usize,
    pub accuracy: AccuracyEstimate,
    /// exp(−k·chernoff_lb) from the single-session report.
    pub pe_envelope: f64,
    pub mi_envelope_bits: f64,
}

/// Accuracy of the block classifier as the number of concatenated sessions
/// grows. Each session is a fresh trial, so sessions are conditionally
/// independent given the label.
pub fn multi_session_experiment(cfg: &ScenarioConfig) -> Result<Vec<SessionRow>> {
    cfg.validate()?;
    let set = TrialSet::simulate(&cfg.bundle()?, cfg.trials)?;
    let result = evaluate(cfg, &set)?;
    let (a, b) = cfg.pair;
    let bins = bins_for(cfg, set.trials);
    let (xa, xb) = (set.column(a, |r| r.psi), set.column(b, |r| r.psi));
    cfg.sessions
        .iter()
        .map(|&k| {
            let accuracy = bayes_accuracy_weighted(&[&xa, &xb], &[0.5, 0.5], bins, cfg.holdout, k)?;
            let p = multi_session_projection(&result.report, k)?;
            Ok(SessionRow {
                sessions: k,
                accuracy,
                pe_envelope: p.pe_envelope,
                mi_envelope_bits: p.mi_envelope_bits,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSessionRow {
    pub sessions: usize,
    /// Exact Bayes error of the k-fold product of the pair channel.
    pub bayes_error: f64,
    /// −(1/k)·ln(bayes_error), nats.
    pub exponent_nats: f64,
    /// Chernoff information of the single-session pair, nats.
    pub chernoff_nats: f64,
}

/// Exact k-session Bayes errors of the pair channel with renormalized priors.
pub fn oracle_sessions(spec: &OracleSpec, sessions: &[usize]) -> Result<Vec<OracleSessionRow>> {
    let (x, y) = spec.pair;
    let pair = spec.channel.pair(x, y)?;
    let chernoff = exact_chernoff(pair.row(0), pair.row(1), 1e-10)?.nats();
    sessions
        .iter()
        .map(|&k| {
            if k == 0 {
                return Err(Error::invalid("sessions", "must be at least 1"));
            }
            let bayes_error = exact_bayes_error(&product_channel(&pair, k, DEFAULT_PRODUCT_CAP)?);
            Ok(OracleSessionRow {
                sessions: k,
                bayes_error,
                exponent_nats: -bayes_error.ln() / k as f64,
                chernoff_nats: chernoff,
            })
        })
        .collect()
}

/// Oracle spec for BSC(ε) with equal priors.
pub fn bsc_spec(eps: f64) -> Result<OracleSpec> {
    Ok(OracleSpec {
        channel: DiscreteChannel::bsc(eps)?,
        pair: (0, 1),
    })
}
