//! Histogram (plug-in) estimators of total variation, mutual information and
//! Bayes accuracy from scalar feature samples.

use crate::error::{Error, Result};
use crate::estimators::Z99;

/// ⌈n^{1/3}⌉ clipped to [2, 256].
pub fn default_bins(n: usize) -> usize {
    ((n as f64).cbrt().ceil() as usize).clamp(2, 256)
}

/// Equal-width bins over a closed range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    lo: f64,
    width: f64,
    bins: usize,
}

impl Binning {
    /// Bins spanning every value in `groups`.
    pub fn spanning<'a>(groups: impl IntoIterator<Item = &'a [f64]>, bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::invalid("bins", "need at least 2 bins"));
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for g in groups {
            for v in g {
                if !v.is_finite() {
                    return Err(Error::invalid("samples", "non-finite value"));
                }
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        if lo > hi {
            return Err(Error::invalid("samples", "no values"));
        }
        Ok(Self {
            lo,
            width: (hi - lo) / bins as f64,
            bins,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Values outside the range fall into the edge bins.
    pub fn index(&self, v: f64) -> usize {
        if self.width <= 0.0 || v <= self.lo {
            return 0;
        }
        (((v - self.lo) / self.width) as usize).min(self.bins - 1)
    }

    pub fn histogram(&self, values: &[f64]) -> Vec<u64> {
        let mut h = vec![0u64; self.bins];
        for v in values {
            h[self.index(*v)] += 1;
        }
        h
    }
}

/// ½ Σ_b |p̂_b − q̂_b| over shared equal-width bins.
pub fn empirical_tv(xs: &[f64], ys: &[f64], bins: usize) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("samples", "both sample sets must be non-empty"));
    }
    let b = Binning::spanning([xs, ys], bins)?;
    let (hx, hy) = (b.histogram(xs), b.histogram(ys));
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    Ok(0.5
        * hx.iter()
            .zip(&hy)
            .map(|(a, c)| (*a as f64 / nx - *c as f64 / ny).abs())
            .sum::<f64>())
}

/// Plug-in mutual information with a 99% interval, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub bits: f64,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl MiEstimate {
    pub fn excludes_zero(&self) -> bool {
        self.lo > 0.0
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Plug-in I(label; binned value) in bits from labelled samples, with label
/// frequencies as the prior.
pub fn plugin_mi(samples: &[(usize, f64)], bins: usize) -> Result<f64> {
    plugin_mi_estimate(samples, bins).map(|e| e.bits)
}

/// [`plugin_mi`] together with its interval.
pub fn plugin_mi_estimate(samples: &[(usize, f64)], bins: usize) -> Result<MiEstimate> {
    let groups = group_by_label(samples);
    if groups.iter().filter(|g| !g.is_empty()).count() < 2 {
        return Err(Error::invalid("samples", "need at least two labels"));
    }
    let n = samples.len() as f64;
    let priors: Vec<f64> = groups.iter().map(|g| g.len() as f64 / n).collect();
    let refs: Vec<&[f64]> = groups.iter().map(|g| g.as_slice()).collect();
    plugin_mi_weighted(&refs, &priors, bins)
}

fn group_by_label(samples: &[(usize, f64)]) -> Vec<Vec<f64>> {
    let k = samples.iter().map(|s| s.0 + 1).max().unwrap_or(0);
    let mut groups = vec![Vec::new(); k];
    for &(l, v) in samples {
        groups[l].push(v);
    }
    groups
}

/// Plug-in I(X; binned value) with conditionals estimated per group and the
/// given prior. The interval is the delta-method normal interval, with the
/// lower end Miller–Madow bias corrected.
pub fn plugin_mi_weighted(groups: &[&[f64]], priors: &[f64], bins: usize) -> Result<MiEstimate> {
    if groups.len() != priors.len() {
        return Err(Error::invalid("priors", "one prior per group required"));
    }
    let active: Vec<(usize, &[f64])> = groups
        .iter()
        .enumerate()
        .filter(|(i, g)| !g.is_empty() && priors[*i] > 0.0)
        .map(|(i, g)| (i, *g))
        .collect();
    if active.len() < 2 {
        return Err(Error::invalid("samples", "need at least two labels with samples"));
    }
    let binning = Binning::spanning(active.iter().map(|(_, g)| *g), bins)?;
    let mass: f64 = active.iter().map(|(i, _)| priors[*i]).sum();
    let cond: Vec<(f64, Vec<f64>)> = active
        .iter()
        .map(|(i, g)| {
            let h = binning.histogram(g);
            let n = g.len() as f64;
            (priors[*i] / mass, h.iter().map(|c| *c as f64 / n).collect())
        })
        .collect();
    let mut py = vec![0.0; binning.bins()];
    for (p, row) in &cond {
        for (acc, q) in py.iter_mut().zip(row) {
            *acc += p * q;
        }
    }
    // I in nats and the second moment of the information density
    let (mut mi, mut m2) = (0.0, 0.0);
    for (p, row) in &cond {
        for (q, m) in row.iter().zip(&py) {
            if *q > 0.0 {
                let dens = (q / m).ln();
                mi += p * q * dens;
                m2 += p * q * dens * dens;
            }
        }
    }
    let n: usize = active.iter().map(|(_, g)| g.len()).sum();
    let var = (m2 - mi * mi).max(0.0) / n as f64;
    let rows = cond.len() as f64;
    let cols = py.iter().filter(|m| **m > 0.0).count() as f64;
    let bias = (rows - 1.0) * (cols - 1.0).max(0.0) / (2.0 * n as f64);
    let to_bits = std::f64::consts::LOG2_E;
    let mi = mi.max(0.0);
    Ok(MiEstimate {
        bits: mi * to_bits,
        lo: ((mi - bias - Z99 * var.sqrt()) * to_bits).max(0.0),
        hi: (mi + Z99 * var.sqrt()) * to_bits,
        n,
    })
}

/// Histogram Bayes classifier: per-label bin likelihoods with add-½
/// smoothing, argmax posterior, ties to the lowest label index.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramClassifier {
    binning: Binning,
    log_lik: Vec<Vec<f64>>,
    log_prior: Vec<f64>,
}

impl HistogramClassifier {
    pub fn fit(train: &[&[f64]], priors: &[f64], bins: usize) -> Result<Self> {
        if train.len() < 2 || train.len() != priors.len() {
            return Err(Error::invalid("train", "need one training set per label, at least two"));
        }
        if train.iter().any(|g| g.is_empty()) {
            return Err(Error::invalid("train", "every label needs training samples"));
        }
        let binning = Binning::spanning(train.iter().copied(), bins)?;
        let log_lik = train
            .iter()
            .map(|g| {
                let h = binning.histogram(g);
                let denom = g.len() as f64 + 0.5 * bins as f64;
                h.iter().map(|c| ((*c as f64 + 0.5) / denom).ln()).collect()
            })
            .collect();
        let log_prior = priors.iter().map(|p| p.ln()).collect();
        Ok(Self {
            binning,
            log_lik,
            log_prior,
        })
    }

    /// Predicts the label of a group of conditionally i.i.d. observations.
    pub fn predict(&self, observations: &[f64]) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for (l, (lik, prior)) in self.log_lik.iter().zip(&self.log_prior).enumerate() {
            let score = prior + observations.iter().map(|v| lik[self.binning.index(*v)]).sum::<f64>();
            if score > best.1 {
                best = (l, score);
            }
        }
        best.0
    }
}

/// Held-out accuracy with a 99% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyEstimate {
    pub accuracy: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_test: usize,
}

/// Splits each group: the trailing `holdout` fraction (at least one sample)
/// is held out.
pub fn split_holdout(values: &[f64], holdout: f64) -> (&[f64], &[f64]) {
    let k = ((values.len() as f64 * holdout).ceil() as usize).clamp(1, values.len());
    values.split_at(values.len() - k)
}

/// Accuracy of the histogram Bayes classifier trained on the leading part of
/// each label's samples and evaluated on the held-out tail.
pub fn bayes_accuracy(samples: &[(usize, f64)], bins: usize, holdout: f64) -> Result<AccuracyEstimate> {
    let groups = group_by_label(samples);
    let refs: Vec<&[f64]> = groups.iter().map(|g| g.as_slice()).collect();
    let n = samples.len() as f64;
    let priors: Vec<f64> = groups.iter().map(|g| g.len() as f64 / n).collect();
    bayes_accuracy_weighted(&refs, &priors, bins, holdout, 1)
}

/// Prior-weighted held-out accuracy where each test item is a block of
/// `sessions` consecutive held-out observations of one label.
pub fn bayes_accuracy_weighted(
    groups: &[&[f64]],
    priors: &[f64],
    bins: usize,
    holdout: f64,
    sessions: usize,
) -> Result<AccuracyEstimate> {
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(Error::invalid("holdout", "must lie in (0, 1)"));
    }
    if sessions == 0 {
        return Err(Error::invalid("sessions", "must be at least 1"));
    }
    if groups.len() < 2 {
        return Err(Error::invalid("samples", "need at least two labels"));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (l, g) in groups.iter().enumerate() {
        if g.len() < 2 {
            return Err(Error::invalid(
                "samples",
                format!("label {l} needs samples in both training and holdout splits"),
            ));
        }
        let (tr, te) = split_holdout(g, holdout);
        if te.len() < sessions {
            return Err(Error::invalid(
                "holdout",
                format!("label {l} holdout has {} samples, fewer than {sessions}", te.len()),
            ));
        }
        train.push(tr);
        test.push(te);
    }
    let clf = HistogramClassifier::fit(&train, priors, bins)?;
    let mass: f64 = priors.iter().sum();
    let (mut acc, mut var, mut n_test) = (0.0, 0.0, 0);
    for (l, te) in test.iter().enumerate() {
        let blocks: Vec<&[f64]> = te.chunks_exact(sessions).collect();
        let hits = blocks.iter().filter(|b| clf.predict(b) == l).count();
        let m = blocks.len() as f64;
        let a = hits as f64 / m;
        let w = priors[l] / mass;
        acc += w * a;
        var += w * w * a * (1.0 - a) / m;
        n_test += blocks.len();
    }
    let half = Z99 * var.sqrt();
    Ok(AccuracyEstimate {
        accuracy: acc,
        lo: (acc - half).max(0.0),
        hi: (acc + half).min(1.0),
        n_test,
    })
}
