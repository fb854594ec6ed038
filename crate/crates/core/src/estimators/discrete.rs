//! Finite-alphabet channels and exact information quantities.
//!
//! These are the ground-truth oracles: every inequality the bounds module
//! evaluates can be checked exactly on a [`DiscreteChannel`].

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};

/// Enumeration cap for [`product_channel`].
pub const DEFAULT_PRODUCT_CAP: usize = 1 << 20;

const STOCHASTIC_TOL: f64 = 1e-12;

/// A discrete memoryless channel with an input prior.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    priors: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

fn check_distribution(field: &str, v: &[f64]) -> Result<()> {
    if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::invalid(field, format!("entry {x} is not a probability")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::invalid(field, format!("sums to {s}, not 1")));
    }
    Ok(())
}

impl DiscreteChannel {
    pub fn new(priors: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::invalid("channel.inputs", "need at least 2 inputs"));
        }
        if priors.len() != rows.len() {
            return Err(Error::invalid(
                "channel.priors",
                format!("{} priors for {} inputs", priors.len(), rows.len()),
            ));
        }
        let outputs = rows[0].len();
        if outputs < 2 {
            return Err(Error::invalid("channel.outputs", "need at least 2 outputs"));
        }
        check_distribution("channel.priors", &priors)?;
        for (i, r) in rows.iter().enumerate() {
            if r.len() != outputs {
                return Err(Error::invalid(
                    format!("channel.row[{i}]"),
                    format!("has {} entries, expected {outputs}", r.len()),
                ));
            }
            check_distribution(&format!("channel.row[{i}]"), r)?;
        }
        Ok(Self { priors, rows })
    }

    /// Binary symmetric channel with crossover `eps` and equal priors.
    pub fn bsc(eps: f64) -> Result<Self> {
        Self::new(vec![0.5, 0.5], vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    /// Noiseless channel on `k` symbols with uniform prior.
    pub fn perfect(k: usize) -> Result<Self> {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(vec![1.0 / k as f64; k], rows)
    }

    /// Random channel: rows and prior are normalized exponentials, with
    /// roughly one entry in five set to zero.
    pub fn random<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        fn dist<R: Rng + ?Sized>(k: usize, rng: &mut R, zeros: bool) -> Vec<f64> {
            loop {
                let mut v: Vec<f64> = (0..k)
                    .map(|_| {
                        if zeros && rng.random_range(0..5) == 0 {
                            0.0
                        } else {
                            -rng.random::<f64>().max(1e-300).ln()
                        }
                    })
                    .collect();
                let s: f64 = v.iter().sum();
                if s > 0.0 {
                    v.iter_mut().for_each(|x| *x /= s);
                    return v;
                }
            }
        }
        let priors = dist(inputs, rng, false);
        let rows = (0..inputs).map(|_| dist(outputs, rng, true)).collect();
        Self { priors, rows }
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Replaces the prior, keeping the conditionals.
    pub fn with_priors(&self, priors: Vec<f64>) -> Result<Self> {
        Self::new(priors, self.rows.clone())
    }

    /// The output marginal P(y).
    pub fn output_marginal(&self) -> Vec<f64> {
        let mut py = vec![0.0; self.outputs()];
        for (p, row) in self.priors.iter().zip(&self.rows) {
            for (acc, q) in py.iter_mut().zip(row) {
                *acc += p * q;
            }
        }
        py
    }

    /// Two-input sub-channel on inputs `x`, `x2` with priors renormalized.
    pub fn pair(&self, x: usize, x2: usize) -> Result<Self> {
        self.check_index(x)?;
        self.check_index(x2)?;
        let (a, b) = (self.priors[x], self.priors[x2]);
        if a + b <= 0.0 {
            return Err(Error::invalid("channel.priors", "pair has no prior mass"));
        }
        Self::new(
            vec![a / (a + b), b / (a + b)],
            vec![self.rows[x].clone(), self.rows[x2].clone()],
        )
    }

    /// Draws one output symbol for input `x`.
    pub fn sample<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (y, p) in self.rows[x].iter().enumerate() {
            acc += p;
            if u < acc {
                return y;
            }
        }
        // rounding left u above the running sum: last symbol with mass
        self.rows[x].iter().rposition(|p| *p > 0.0).unwrap_or(0)
    }

    fn check_index(&self, x: usize) -> Result<()> {
        if x < self.inputs() {
            Ok(())
        } else {
            Err(Error::invalid(
                "channel.input",
                format!("index {x} out of range 0..{}", self.inputs()),
            ))
        }
    }

    /// Parses the plain-text matrix format: `#` comments and blank lines are
    /// ignored, the first data line holds the priors (optionally prefixed by
    /// `priors` or `priors:`), and each following line is one conditional row.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut priors: Option<Vec<f64>> = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace().peekable();
            let labelled = matches!(tokens.peek(), Some(&"priors") | Some(&"priors:"));
            if labelled {
                if priors.is_some() {
                    return Err(Error::Parse {
                        line: i + 1,
                        reason: "duplicate priors line".into(),
                    });
                }
                tokens.next();
            }
            let values = tokens
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 1,
                        reason: format!("`{t}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    reason: "no values".into(),
                });
            }
            if priors.is_none() {
                priors = Some(values);
            } else {
                rows.push(values);
            }
        }
        let priors = priors.ok_or(Error::Parse {
            line: 0,
            reason: "missing priors line".into(),
        })?;
        Self::new(priors, rows)
    }

    /// Renders the plain-text format read by [`DiscreteChannel::from_text`].
    pub fn to_text(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        writeln!(s, "priors {}", join(&self.priors)).unwrap();
        for r in &self.rows {
            writeln!(s, "{}", join(r)).unwrap();
        }
        s
    }
}

/// ½ Σ_y |P(y|x) − P(y|x2)|.
pub fn exact_tv(ch: &DiscreteChannel, x: usize, x2: usize) -> Result<f64> {
    if x == x2 {
        return Err(Error::invalid("channel.input", "x and x2 must differ"));
    }
    ch.check_index(x)?;
    ch.check_index(x2)?;
    Ok(tv_distance(ch.row(x), ch.row(x2)))
}

/// Total variation between two distributions on a common finite support.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// I(X;Y) in bits.
pub fn exact_mi(ch: &DiscreteChannel) -> f64 {
    let py = ch.output_marginal();
    let mut mi = 0.0;
    for (px, row) in ch.priors.iter().zip(&ch.rows) {
        for (q, m) in row.iter().zip(&py) {
            if *px > 0.0 && *q > 0.0 {
                mi += px * q * (q / m).log2();
            }
        }
    }
    mi.max(0.0)
}

/// H(X) in bits.
pub fn prior_entropy(ch: &DiscreteChannel) -> f64 {
    entropy_bits(ch.priors())
}

pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|x| **x > 0.0).map(|x| x * x.log2()).sum::<f64>()
}

/// Minimum probability of error: 1 − Σ_y max_x p(x)P(y|x).
pub fn exact_bayes_error(ch: &DiscreteChannel) -> f64 {
    let correct: f64 = (0..ch.outputs())
        .map(|y| {
            ch.priors
                .iter()
                .zip(&ch.rows)
                .map(|(p, r)| p * r[y])
                .fold(0.0, f64::max)
        })
        .sum();
    (1.0 - correct).max(0.0)
}

/// Chernoff information between two distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chernoff {
    Finite { nats: f64, lambda: f64 },
    /// Disjoint supports.
    Infinite,
}

impl Chernoff {
    pub fn nats(&self) -> f64 {
        match self {
            Chernoff::Finite { nats, .. } => *nats,
            Chernoff::Infinite => f64::INFINITY,
        }
    }
}

/// −ln min_{λ∈[0,1]} Σ_y p(y)^λ q(y)^{1−λ}: a 101-point grid scan followed by
/// golden-section refinement of the bracketing cell to `tol`.
pub fn exact_chernoff(p: &[f64], q: &[f64], tol: f64) -> Result<Chernoff> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::invalid("distributions", "must share a non-empty support"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance", "must be positive"));
    }
    let common: Vec<(f64, f64)> = p
        .iter()
        .zip(q)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (*a, *b))
        .collect();
    if common.is_empty() {
        return Ok(Chernoff::Infinite);
    }
    let f = |l: f64| -> f64 { common.iter().map(|(a, b)| a.powf(l) * b.powf(1.0 - l)).sum() };

    const GRID: usize = 101;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..GRID {
        let v = f(i as f64 / (GRID - 1) as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let step = 1.0 / (GRID - 1) as f64;
    let mut lo = (best_i as f64 - 1.0).max(0.0) * step;
    let mut hi = (best_i as f64 + 1.0).min((GRID - 1) as f64) * step;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let (lambda, min) = [(mid, f(mid)), (best_i as f64 * step, best)]
        .into_iter()
        .fold((mid, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
    Ok(Chernoff::Finite {
        nats: (-min.ln()).max(0.0),
        lambda,
    })
}

/// The channel observed `n` times with conditionally i.i.d. outputs. Output
/// tuples are enumerated in lexicographic order.
pub fn product_channel(ch: &DiscreteChannel, n: usize, cap: usize) -> Result<DiscreteChannel> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    let required = (ch.outputs() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(Error::Capacity { required, cap });
    }
    let rows = ch
        .rows
        .iter()
        .map(|row| {
            let mut acc = vec![1.0];
            for _ in 0..n {
                acc = acc
                    .iter()
                    .flat_map(|a| row.iter().map(move |b| a * b))
                    .collect();
            }
            acc
        })
        .collect();
    // products of stochastic rows drift from 1 by rounding only
    Ok(DiscreteChannel {
        priors: ch.priors.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{layer_rng, Layer};

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn bsc_constants() {
        let ch = DiscreteChannel::bsc(0.1).unwrap();
        assert!((exact_tv(&ch, 0, 1).unwrap() - 0.8).abs() < 1e-15);
        assert!((exact_mi(&ch) - (1.0 - h2(0.1))).abs() < 1e-12);
        assert!((exact_mi(&ch) - 0.531).abs() < 1e-3);
        assert!((exact_bayes_error(&ch) - 0.1).abs() < 1e-15);
        let c = exact_chernoff(ch.row(0), ch.row(1), 1e-10).unwrap();
        assert!((c.nats() - (-(0.6f64).ln())).abs() < 1e-10, "{c:?}");
    }

    #[test]
    fn degenerate_channels() {
        let same = DiscreteChannel::new(vec![0.3, 0.7], vec![vec![0.2, 0.8], vec![0.2, 0.8]]).unwrap();
        assert_eq!(exact_tv(&same, 0, 1).unwrap(), 0.0);
        assert!(exact_mi(&same).abs() < 1e-15);
        assert!((exact_bayes_error(&same) - 0.3).abs() < 1e-15);
        let c = exact_chernoff(same.row(0), same.row(1), 1e-10).unwrap();
        assert!(c.nats().abs() < 1e-12);

        for k in [2, 3, 5] {
            let p = DiscreteChannel::perfect(k).unwrap();
            assert!((exact_mi(&p) - (k as f64).log2()).abs() < 1e-12);
            assert_eq!(exact_bayes_error(&p), 0.0);
            assert_eq!(exact_tv(&p, 0, 1).unwrap(), 1.0);
        }
        let p = DiscreteChannel::perfect(2).unwrap();
        assert_eq!(exact_chernoff(p.row(0), p.row(1), 1e-10).unwrap(), Chernoff::Infinite);
    }

    #[test]
    fn index_errors() {
        let ch = DiscreteChannel::bsc(0.1).unwrap();
        assert!(exact_tv(&ch, 0, 0).is_err());
        assert!(exact_tv(&ch, 0, 2).is_err());
    }

    #[test]
    fn chernoff_dominates_bhattacharyya() {
        let p = [0.1, 0.9];
        let q = [0.5, 0.5];
        let b = -((0.05f64).sqrt() + (0.45f64).sqrt()).ln();
        assert!((b - 0.11157).abs() < 1e-5);
        let c = exact_chernoff(&p, &q, 1e-10).unwrap().nats();
        assert!(c >= b);
    }

    #[test]
    fn product_channel_majority_vote() {
        let ch = DiscreteChannel::bsc(0.1).unwrap();
        assert_eq!(product_channel(&ch, 1, DEFAULT_PRODUCT_CAP).unwrap(), ch);
        let p3 = product_channel(&ch, 3, DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(p3.outputs(), 8);
        assert!((exact_bayes_error(&p3) - 0.028).abs() < 1e-12);
        let mut prev = 0.0;
        for n in 1..=6 {
            let mi = exact_mi(&product_channel(&ch, n, DEFAULT_PRODUCT_CAP).unwrap());
            assert!(mi >= prev - 1e-12);
            prev = mi;
        }
        assert!(matches!(
            product_channel(&ch, 21, DEFAULT_PRODUCT_CAP),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn text_format() {
        let ch = DiscreteChannel::from_text("# bsc\npriors: 0.5 0.5\n0.9 0.1\n\n0.1 0.9 # row 1\n").unwrap();
        assert_eq!(ch, DiscreteChannel::bsc(0.1).unwrap());
        let unlabelled = DiscreteChannel::from_text("0.25 0.75\n1 0 0\n0 0.5 0.5\n").unwrap();
        assert_eq!(unlabelled.outputs(), 3);
        assert_eq!(DiscreteChannel::from_text(&unlabelled.to_text()).unwrap(), unlabelled);

        assert!(matches!(DiscreteChannel::from_text(""), Err(Error::Parse { .. })));
        assert!(matches!(DiscreteChannel::from_text("0.5 x\n"), Err(Error::Parse { line: 1, .. })));
        assert!(DiscreteChannel::from_text("0.5 0.5\n0.9 0.1\n").is_err());
        assert!(DiscreteChannel::from_text("0.5 0.5\n0.9 0.2\n0.1 0.9\n").is_err());
        assert!(DiscreteChannel::from_text("0.5 0.5\n0.9 0.1\n0.1 0.8 0.1\n").is_err());
        assert!(DiscreteChannel::from_text("priors 0.5 0.5\npriors 0.5 0.5\n").is_err());
    }

    #[test]
    fn sampling_matches_rows() {
        let ch = DiscreteChannel::new(vec![0.5, 0.5], vec![vec![0.2, 0.3, 0.5], vec![0.0, 0.0, 1.0]]).unwrap();
        let mut rng = layer_rng(3, Layer::Sampler);
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[ch.sample(0, &mut rng)] += 1;
        }
        for (c, p) in counts.iter().zip(ch.row(0)) {
            assert!((*c as f64 / n as f64 - p).abs() < 0.01);
        }
        assert!((0..1000).all(|_| ch.sample(1, &mut rng) == 2));
    }
}
