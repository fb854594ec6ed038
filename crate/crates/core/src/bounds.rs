//! Closed-form leakage bounds and the report that collects them.
//!
//! Units: mutual information in bits, Chernoff and Bhattacharyya quantities in
//! nats. Formulas never convert between the two.
//!
//! Scales: Δ̄ and C are measured in units of the protocol-layer statistic φ,
//! bounded by `m`. The observation statistic ψ is always bounded by 1, so the
//! total-variation step uses bound 1 and the report records both scales.

use std::f64::consts::LN_2;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Parameters of the leakage theorem for one label pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Protocol-layer expectation gap Δ̄ of φ.
    pub delta_bar: f64,
    /// Bound C on the conditional mean trajectory distance.
    pub c: f64,
    /// Lipschitz constant L_φ of φ with respect to the metric.
    pub l_phi: f64,
    /// Observation ratio ρ. Zero encodes a degenerate observer.
    pub rho: f64,
    /// Bound M of φ.
    pub m: f64,
    pub prior_x: f64,
    pub prior_x2: f64,
}

impl BoundInputs {
    /// Inputs with equal priors ½, ½.
    pub fn equal_priors(delta_bar: f64, c: f64, l_phi: f64, rho: f64, m: f64) -> Self {
        Self {
            delta_bar,
            c,
            l_phi,
            rho,
            m,
            prior_x: 0.5,
            prior_x2: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must be finite and non-negative")))
            }
        };
        finite_nonneg("delta_bar", self.delta_bar)?;
        finite_nonneg("c", self.c)?;
        if !(self.l_phi.is_finite() && self.l_phi > 0.0) {
            return Err(Error::invalid("l_phi", "must be positive"));
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::invalid("m", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::invalid("rho", "must lie in [0, 1]"));
        }
        if self.delta_bar > 2.0 * self.m * (1.0 + 1e-12) {
            return Err(Error::invalid("delta_bar", "exceeds 2M for a statistic bounded by M"));
        }
        for (name, p) in [("prior_x", self.prior_x), ("prior_x2", self.prior_x2)] {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::invalid(name, "must lie in (0, 1]"));
            }
        }
        if self.prior_x + self.prior_x2 > 1.0 + 1e-12 {
            return Err(Error::invalid("prior_x", "pair priors sum above 1"));
        }
        Ok(())
    }
}

/// Surviving network-layer gap δ_N = Δ̄ − 2·L_φ·C. Positive iff the
/// propagation condition C < Δ̄/(2L_φ) holds.
pub fn delta_n(delta_bar: f64, l_phi: f64, c: f64) -> f64 {
    delta_bar - 2.0 * l_phi * c
}

/// min(1, δ/(2M)): the total variation any pair of laws must have when a
/// statistic bounded by M separates their means by δ.
pub fn tv_lower_bound_from_expectation(delta: f64, m: f64) -> f64 {
    (delta.max(0.0) / (2.0 * m)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiLowerBound {
    /// (2/ln2)·p·p'·(ρδ_N/2)², bits.
    pub general_bits: f64,
    /// (1/(2ln2))·(ρδ_N/2)², bits.
    pub equal_prior_bits: f64,
    pub condition_v_ok: bool,
}

/// Mutual-information lower bound; zero when the propagation condition fails.
pub fn theorem_mi_lower_bound(inputs: &BoundInputs) -> MiLowerBound {
    let dn = delta_n(inputs.delta_bar, inputs.l_phi, inputs.c);
    if dn <= 0.0 {
        return MiLowerBound {
            general_bits: 0.0,
            equal_prior_bits: 0.0,
            condition_v_ok: false,
        };
    }
    let tv = tv_lower_bound_from_expectation(inputs.rho * dn, 1.0);
    MiLowerBound {
        general_bits: 2.0 / LN_2 * inputs.prior_x * inputs.prior_x2 * tv * tv,
        equal_prior_bits: tv * tv / (2.0 * LN_2),
        condition_v_ok: true,
    }
}

/// min(1, ½ + ρ·max(0, δ_N)/4), binary equal-prior Bayes accuracy bound.
pub fn accuracy_lower_bound(rho: f64, delta_bar: f64, l_phi: f64, c: f64) -> f64 {
    (0.5 + rho * delta_n(delta_bar, l_phi, c).max(0.0) / 4.0).min(1.0)
}

/// (1 + TV)/2, the exact binary equal-prior Bayes accuracy.
pub fn accuracy_from_tv(tv: f64) -> f64 {
    (1.0 + tv) / 2.0
}

/// H2(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// The unique p ∈ [0, ½] with H2(p) = h, by bisection.
pub fn inverse_binary_entropy(h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::invalid("entropy", format!("{h} outside [0, 1]")));
    }
    if h == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// max(0, (H(X) − I − 1)/log2(M − 1)) for M ≥ 3 classes.
pub fn fano_error_lower_bound(h_x: f64, i: f64, classes: usize) -> Result<f64> {
    if classes < 3 {
        return Err(Error::invalid(
            "classes",
            "the general form needs at least 3 classes; use fano_binary_error_lower_bound",
        ));
    }
    if !(i >= 0.0 && h_x >= i) {
        return Err(Error::invalid("mutual_information", "need H(X) >= I >= 0"));
    }
    Ok(((h_x - i - 1.0) / ((classes - 1) as f64).log2()).max(0.0))
}

/// H2⁻¹(1 − I) for a binary equal-prior problem.
pub fn fano_binary_error_lower_bound(i: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&i) {
        return Err(Error::invalid("mutual_information", format!("{i} outside [0, 1]")));
    }
    inverse_binary_entropy(1.0 - i)
}

/// −½·ln(1 − TV²); infinite at TV = 1.
pub fn chernoff_lower_bound_from_tv(tv: f64) -> f64 {
    if tv >= 1.0 {
        return f64::INFINITY;
    }
    -0.5 * (1.0 - tv * tv).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bhattacharyya {
    pub coefficient: f64,
    /// −ln(coefficient), nats.
    pub distance: f64,
}

pub fn bhattacharyya(p: &[f64], q: &[f64]) -> Result<Bhattacharyya> {
    if p.len() != q.len() || p.is_empty() {
        return Err(Error::invalid("distributions", "must share a non-empty support"));
    }
    let coefficient: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
    Ok(Bhattacharyya {
        coefficient,
        distance: -coefficient.ln(),
    })
}

/// Every bound derived from one [`BoundInputs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    pub inputs: BoundInputs,
    /// Bound of ψ used in the total-variation step.
    pub psi_bound: f64,
    pub delta_n: f64,
    pub condition_v_ok: bool,
    pub tv_lb: f64,
    pub mi_lb_bits: f64,
    pub mi_lb_equal_prior_bits: f64,
    pub acc_lb: f64,
    pub chernoff_lb_nats: f64,
    /// Binary Fano error bound, present when an MI value was supplied.
    pub fano_pe_lb: Option<f64>,
    pub empirical_mi_bits: Option<f64>,
    /// The supplied MI fell below the MI lower bound.
    pub consistency_violation: bool,
}

/// Assembles the report. Pure in its arguments.
pub fn build_report(inputs: &BoundInputs, empirical_mi_bits: Option<f64>) -> Result<LeakageReport> {
    inputs.validate()?;
    let dn = delta_n(inputs.delta_bar, inputs.l_phi, inputs.c);
    let mi = theorem_mi_lower_bound(inputs);
    let ok = mi.condition_v_ok;
    let tv_lb = if ok {
        tv_lower_bound_from_expectation(inputs.rho * dn, 1.0)
    } else {
        0.0
    };
    let acc_lb = if ok {
        accuracy_lower_bound(inputs.rho, inputs.delta_bar, inputs.l_phi, inputs.c)
    } else {
        0.5
    };
    let fano_pe_lb = match empirical_mi_bits {
        Some(i) => {
            let s = inputs.prior_x + inputs.prior_x2;
            let h = binary_entropy(inputs.prior_x / s);
            Some(inverse_binary_entropy((h - i.max(0.0)).clamp(0.0, 1.0))?)
        }
        None => None,
    };
    Ok(LeakageReport {
        inputs: *inputs,
        psi_bound: 1.0,
        delta_n: dn,
        condition_v_ok: ok,
        tv_lb,
        mi_lb_bits: mi.general_bits,
        mi_lb_equal_prior_bits: mi.equal_prior_bits,
        acc_lb,
        chernoff_lb_nats: chernoff_lower_bound_from_tv(tv_lb),
        fano_pe_lb,
        empirical_mi_bits,
        consistency_violation: empirical_mi_bits.is_some_and(|i| i < mi.general_bits),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl LeakageReport {
    /// Stable column names of [`LeakageReport::csv_row`].
    pub const CSV_COLUMNS: [&'static str; 18] = [
        "delta_bar",
        "c",
        "l_phi",
        "rho",
        "m",
        "psi_bound",
        "prior_x",
        "prior_x2",
        "delta_n",
        "condition_v_ok",
        "tv_lb",
        "mi_lb_bits",
        "mi_lb_equal_prior_bits",
        "acc_lb",
        "chernoff_lb_nats",
        "fano_pe_lb",
        "empirical_mi_bits",
        "consistency_violation",
    ];

    pub fn csv_header() -> String {
        Self::CSV_COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        let i = &self.inputs;
        [
            i.delta_bar.to_string(),
            i.c.to_string(),
            i.l_phi.to_string(),
            i.rho.to_string(),
            i.m.to_string(),
            self.psi_bound.to_string(),
            i.prior_x.to_string(),
            i.prior_x2.to_string(),
            self.delta_n.to_string(),
            self.condition_v_ok.to_string(),
            self.tv_lb.to_string(),
            self.mi_lb_bits.to_string(),
            self.mi_lb_equal_prior_bits.to_string(),
            self.acc_lb.to_string(),
            self.chernoff_lb_nats.to_string(),
            opt(self.fano_pe_lb),
            opt(self.empirical_mi_bits),
            self.consistency_violation.to_string(),
        ]
        .join(",")
    }

    /// Human-readable block, one `key = value  # unit` line per field.
    pub fn structured(&self) -> String {
        let i = &self.inputs;
        let rows: [(&str, String, &str); 18] = [
            ("delta_bar", i.delta_bar.to_string(), "phi units"),
            ("c", i.c.to_string(), "metric units"),
            ("l_phi", i.l_phi.to_string(), "phi units per metric unit"),
            ("rho", i.rho.to_string(), "ratio"),
            ("m", i.m.to_string(), "phi bound"),
            ("psi_bound", self.psi_bound.to_string(), "psi bound"),
            ("prior_x", i.prior_x.to_string(), "probability"),
            ("prior_x2", i.prior_x2.to_string(), "probability"),
            ("delta_n", self.delta_n.to_string(), "phi units"),
            ("condition_v_ok", self.condition_v_ok.to_string(), "flag"),
            ("tv_lb", self.tv_lb.to_string(), "probability"),
            ("mi_lb_bits", self.mi_lb_bits.to_string(), "bits"),
            ("mi_lb_equal_prior_bits", self.mi_lb_equal_prior_bits.to_string(), "bits"),
            ("acc_lb", self.acc_lb.to_string(), "probability"),
            ("chernoff_lb_nats", self.chernoff_lb_nats.to_string(), "nats"),
            ("fano_pe_lb", self.fano_pe_lb.map_or("none".into(), |v| v.to_string()), "probability"),
            ("empirical_mi_bits", self.empirical_mi_bits.map_or("none".into(), |v| v.to_string()), "bits"),
            ("consistency_violation", self.consistency_violation.to_string(), "flag"),
        ];
        let mut s = String::from("[leakage_report]\n");
        for (k, v, unit) in rows {
            writeln!(s, "{k} = {v}  # {unit}").unwrap();
        }
        s
    }
}

/// Multi-session extrapolation of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionProjection {
    pub sessions: usize,
    /// n·mi_lb: an envelope, exact only for conditionally i.i.d. sessions
    /// where the single-session bound is tight.
    pub mi_envelope_bits: f64,
    pub error_exponent_nats: f64,
    /// exp(−n·chernoff_lb).
    pub pe_envelope: f64,
    pub vacuous: bool,
}

pub fn multi_session_projection(report: &LeakageReport, sessions: usize) -> Result<SessionProjection> {
    if sessions == 0 {
        return Err(Error::invalid("sessions", "must be at least 1"));
    }
    if !report.condition_v_ok {
        return Ok(SessionProjection {
            sessions,
            mi_envelope_bits: 0.0,
            error_exponent_nats: 0.0,
            pe_envelope: 1.0,
            vacuous: true,
        });
    }
    Ok(SessionProjection {
        sessions,
        mi_envelope_bits: sessions as f64 * report.mi_lb_bits,
        error_exponent_nats: report.chernoff_lb_nats,
        pe_envelope: (-(sessions as f64) * report.chernoff_lb_nats).exp(),
        vacuous: false,
    })
}
