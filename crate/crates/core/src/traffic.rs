//! Semantic labels and application-layer session generation.
//!
//! A session is a marked on/off renewal process: during "on" periods messages
//! arrive as a Poisson stream at the profile's burst rate, each carrying a size
//! drawn from the profile's size family and a direction drawn from its up/down
//! mix. Payload content is never modelled.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{layer_rng, Layer};

/// Default session window in seconds.
pub const DEFAULT_WINDOW_S: f64 = 10.0;

/// Largest message size a generator will emit.
const MAX_MESSAGE_BYTES: f64 = 1.0e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Up => "up",
            Direction::Down => "down",
        })
    }
}

/// A hidden semantic class (website, application) with its prior mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticLabel {
    pub id: u32,
    pub name: String,
    pub prior: f64,
}

impl SemanticLabel {
    pub fn new(id: u32, name: impl Into<String>, prior: f64) -> Self {
        Self {
            id,
            name: name.into(),
            prior,
        }
    }
}

/// Checks that a set of labels forms a semantic space: priors in [0,1]
/// summing to one within 1e-12, ids unique.
pub fn validate_semantic_space(labels: &[SemanticLabel]) -> Result<()> {
    if labels.len() < 2 {
        return Err(Error::invalid("labels", "at least two semantic labels are required"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for l in labels {
        if !(0.0..=1.0).contains(&l.prior) || !l.prior.is_finite() {
            return Err(Error::invalid(
                format!("labels.{}.prior", l.name),
                format!("{} is not a probability", l.prior),
            ));
        }
        if !seen.insert(l.id) {
            return Err(Error::invalid("labels.id", format!("duplicate id {}", l.id)));
        }
    }
    let total: f64 = labels.iter().map(|l| l.prior).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("labels.prior", format!("priors sum to {total}, not 1")));
    }
    Ok(())
}

/// One application-layer message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MessageEvent {
    pub time: f64,
    pub size: u64,
    pub direction: Direction,
}

/// The application-layer sequence of one session.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageSequence {
    pub events: Vec<MessageEvent>,
    pub window: f64,
    pub label: SemanticLabel,
    pub seed: u64,
}

impl MessageSequence {
    pub fn total_bytes(&self) -> u64 {
        self.events.iter().map(|e| e.size).sum()
    }

    pub fn up_fraction(&self) -> Option<f64> {
        if self.events.is_empty() {
            return None;
        }
        let up = self
            .events
            .iter()
            .filter(|e| e.direction == Direction::Up)
            .count();
        Some(up as f64 / self.events.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Video,
    Web,
    Chat,
    Bulk,
    Custom,
}

impl ClassKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassKind::Video => "video",
            ClassKind::Web => "web",
            ClassKind::Chat => "chat",
            ClassKind::Bulk => "bulk",
            ClassKind::Custom => "custom",
        }
    }
}

/// Parametric message-size family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SizeDistribution {
    /// exp(N(mu, sigma^2)) bytes.
    LogNormal { mu: f64, sigma: f64 },
    /// Pareto(scale, shape) truncated to `cap` bytes.
    TruncatedPareto { scale: f64, shape: f64, cap: f64 },
    Fixed { bytes: u64 },
}

impl SizeDistribution {
    fn validate(&self) -> Result<()> {
        match *self {
            SizeDistribution::LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::invalid("size.mu", "must be finite"));
                }
                if !(sigma.is_finite() && sigma >= 0.0) {
                    return Err(Error::invalid("size.sigma", "must be finite and non-negative"));
                }
            }
            SizeDistribution::TruncatedPareto { scale, shape, cap } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::invalid("size.scale", "must be positive"));
                }
                if !(shape.is_finite() && shape > 0.0) {
                    return Err(Error::invalid("size.shape", "must be positive"));
                }
                if !(cap.is_finite() && cap >= scale) {
                    return Err(Error::invalid("size.cap", "must be finite and at least scale"));
                }
            }
            SizeDistribution::Fixed { bytes } => {
                if bytes == 0 {
                    return Err(Error::invalid("size.bytes", "must be at least 1"));
                }
            }
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let raw = match *self {
            SizeDistribution::LogNormal { mu, sigma } => {
                // sigma validated finite and >= 0
                LogNormal::new(mu, sigma).expect("validated").sample(rng)
            }
            SizeDistribution::TruncatedPareto { scale, shape, cap } => {
                // inverse CDF of the Pareto law conditioned on x <= cap
                let tail = (scale / cap).powf(shape);
                let u: f64 = rng.random();
                scale / (1.0 - u * (1.0 - tail)).powf(1.0 / shape)
            }
            SizeDistribution::Fixed { bytes } => bytes as f64,
        };
        raw.round().clamp(1.0, MAX_MESSAGE_BYTES) as u64
    }
}

/// Traffic archetype of one semantic class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficProfile {
    pub kind: ClassKind,
    /// Message arrival rate during "on" periods, in messages per second.
    pub burst_rate: f64,
    pub size: SizeDistribution,
    /// Probability that a message travels upstream.
    pub up_fraction: f64,
    /// Long-run fraction of time spent in "on" periods.
    pub duty_on: f64,
    /// Mean length of one on+off cycle, in seconds.
    pub cycle_period: f64,
}

impl TrafficProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.burst_rate.is_finite() && self.burst_rate >= 0.0) {
            return Err(Error::invalid("profile.burst_rate", "must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.up_fraction) {
            return Err(Error::invalid("profile.up_fraction", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.duty_on) {
            return Err(Error::invalid("profile.duty_on", "must lie in [0, 1]"));
        }
        if !(self.cycle_period.is_finite() && self.cycle_period > 0.0) {
            return Err(Error::invalid("profile.cycle_period", "must be positive"));
        }
        self.size.validate()
    }

    /// Mean message size in bytes, before rounding.
    pub fn mean_message_bytes(&self) -> f64 {
        match self.size {
            SizeDistribution::LogNormal { mu, sigma } => (mu + sigma * sigma / 2.0).exp(),
            SizeDistribution::TruncatedPareto { scale, shape, cap } => {
                let tail = (scale / cap).powf(shape);
                let body = if (shape - 1.0).abs() < 1e-12 {
                    scale * (cap / scale).ln()
                } else {
                    shape * scale / (shape - 1.0) * (1.0 - (scale / cap).powf(shape - 1.0))
                };
                body / (1.0 - tail)
            }
            SizeDistribution::Fixed { bytes } => bytes as f64,
        }
    }
}

/// The built-in archetypes. Parameters are illustrative; only their ordering
/// (video carries far more bytes than web, chat is balanced) is relied on.
pub fn preset_profiles() -> BTreeMap<ClassKind, TrafficProfile> {
    let mut m = BTreeMap::new();
    m.insert(
        ClassKind::Video,
        TrafficProfile {
            kind: ClassKind::Video,
            burst_rate: 12.0,
            size: SizeDistribution::LogNormal {
                mu: 9000f64.ln(),
                sigma: 0.6,
            },
            up_fraction: 0.1,
            duty_on: 0.7,
            cycle_period: 2.0,
        },
    );
    m.insert(
        ClassKind::Web,
        TrafficProfile {
            kind: ClassKind::Web,
            burst_rate: 4.0,
            size: SizeDistribution::TruncatedPareto {
                scale: 800.0,
                shape: 1.5,
                cap: 65536.0,
            },
            up_fraction: 0.3,
            duty_on: 0.5,
            cycle_period: 4.0,
        },
    );
    m.insert(
        ClassKind::Chat,
        TrafficProfile {
            kind: ClassKind::Chat,
            burst_rate: 1.5,
            size: SizeDistribution::Fixed { bytes: 120 },
            up_fraction: 0.5,
            duty_on: 0.9,
            cycle_period: 5.0,
        },
    );
    m.insert(
        ClassKind::Bulk,
        TrafficProfile {
            kind: ClassKind::Bulk,
            burst_rate: 30.0,
            size: SizeDistribution::LogNormal {
                mu: 16000f64.ln(),
                sigma: 0.3,
            },
            up_fraction: 0.02,
            duty_on: 1.0,
            cycle_period: 10.0,
        },
    );
    m
}

/// Looks up a preset by its lowercase name.
pub fn preset(name: &str) -> Option<TrafficProfile> {
    let kind = match name {
        "video" => ClassKind::Video,
        "web" => ClassKind::Web,
        "chat" => ClassKind::Chat,
        "bulk" => ClassKind::Bulk,
        _ => return None,
    };
    preset_profiles().remove(&kind)
}

/// Generates the application-layer message sequence of one session.
pub fn generate_session(
    label: &SemanticLabel,
    profile: &TrafficProfile,
    window: f64,
    seed: u64,
) -> Result<MessageSequence> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::invalid("window", "must be positive"));
    }
    profile.validate()?;
    let mut rng = layer_rng(seed, Layer::Application);
    let mut events = Vec::new();

    if profile.burst_rate > 0.0 && profile.duty_on > 0.0 {
        let gap = Exp::new(profile.burst_rate).expect("rate validated positive");
        let on_len = mean_exp(profile.duty_on * profile.cycle_period);
        let off_len = mean_exp((1.0 - profile.duty_on) * profile.cycle_period);

        let mut t = 0.0;
        let mut on = rng.random::<f64>() < profile.duty_on;
        while t < window {
            let dur = if on {
                on_len.map_or(f64::INFINITY, |d| d.sample(&mut rng))
            } else {
                off_len.map_or(0.0, |d| d.sample(&mut rng))
            };
            let end = (t + dur).min(window);
            if on {
                let mut s = t + gap.sample(&mut rng);
                while s < end {
                    let size = profile.size.sample(&mut rng);
                    let direction = if rng.random::<f64>() < profile.up_fraction {
                        Direction::Up
                    } else {
                        Direction::Down
                    };
                    events.push(MessageEvent {
                        time: s,
                        size,
                        direction,
                    });
                    s += gap.sample(&mut rng);
                }
            }
            t = end;
            on = !on;
        }
    }

    Ok(MessageSequence {
        events,
        window,
        label: label.clone(),
        seed,
    })
}

/// Exponential law with the given mean; `None` when the mean is zero.
fn mean_exp(mean: f64) -> Option<Exp<f64>> {
    (mean > 0.0).then(|| Exp::new(1.0 / mean).expect("positive rate"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label() -> SemanticLabel {
        SemanticLabel::new(0, "x", 0.5)
    }

    fn mean_bytes(kind: ClassKind, seeds: std::ops::Range<u64>) -> f64 {
        let p = &preset_profiles()[&kind];
        let n = seeds.end - seeds.start;
        seeds
            .map(|s| generate_session(&label(), p, 10.0, s).unwrap().total_bytes() as f64)
            .sum::<f64>()
            / n as f64
    }

    #[test]
    fn video_carries_ten_times_web_bytes() {
        let video = mean_bytes(ClassKind::Video, 0..1000);
        let web = mean_bytes(ClassKind::Web, 0..1000);
        assert!(video >= 10.0 * web, "video {video} web {web}");
    }

    #[test]
    fn zero_rate_gives_empty_session() {
        let mut p = preset_profiles()[&ClassKind::Web].clone();
        p.burst_rate = 0.0;
        let s = generate_session(&label(), &p, 10.0, 7).unwrap();
        assert!(s.events.is_empty());
    }

    #[test]
    fn chat_is_balanced() {
        let p = &preset_profiles()[&ClassKind::Chat];
        let fr: Vec<f64> = (0..1000)
            .filter_map(|s| generate_session(&label(), p, 10.0, s).unwrap().up_fraction())
            .collect();
        let mean = fr.iter().sum::<f64>() / fr.len() as f64;
        assert!((0.35..=0.65).contains(&mean), "{mean}");
    }

    #[test]
    fn presets_contain_archetypes_and_validate() {
        let p = preset_profiles();
        for k in [ClassKind::Video, ClassKind::Web, ClassKind::Chat, ClassKind::Bulk] {
            p[&k].validate().unwrap();
        }
        assert_eq!(preset("video").unwrap().kind, ClassKind::Video);
        assert!(preset("nope").is_none());
    }

    #[test]
    fn sessions_are_sorted_and_inside_window() {
        for (kind, p) in preset_profiles() {
            let s = generate_session(&label(), &p, 10.0, 3).unwrap();
            assert!(s.events.windows(2).all(|w| w[0].time <= w[1].time), "{kind:?}");
            assert!(s.events.iter().all(|e| e.time >= 0.0 && e.time <= 10.0 && e.size >= 1));
        }
    }

    #[test]
    fn regeneration_is_bit_identical() {
        let p = &preset_profiles()[&ClassKind::Video];
        let a = generate_session(&label(), p, 10.0, 99).unwrap();
        let b = generate_session(&label(), p, 10.0, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_session(&label(), p, 10.0, 100).unwrap();
        assert_ne!(a.events, c.events);
    }

    #[test]
    fn invalid_profile_names_field() {
        let mut p = preset_profiles()[&ClassKind::Web].clone();
        p.burst_rate = -1.0;
        let e = generate_session(&label(), &p, 10.0, 0).unwrap_err();
        assert!(e.to_string().contains("burst_rate"));
        p.burst_rate = 1.0;
        p.up_fraction = 1.5;
        let e = generate_session(&label(), &p, 10.0, 0).unwrap_err();
        assert!(e.to_string().contains("up_fraction"));
        assert!(generate_session(&label(), &preset_profiles()[&ClassKind::Web], 0.0, 0).is_err());
    }

    #[test]
    fn truncated_pareto_mean_matches_samples() {
        let p = &preset_profiles()[&ClassKind::Web];
        let mut rng = layer_rng(5, Layer::Sampler);
        let n = 200_000;
        let mean = (0..n).map(|_| p.size.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        let want = p.mean_message_bytes();
        assert!((mean - want).abs() / want < 0.05, "{mean} vs {want}");
    }

    #[test]
    fn semantic_space_priors_must_sum_to_one() {
        let ok = [SemanticLabel::new(0, "a", 0.3), SemanticLabel::new(1, "b", 0.7)];
        validate_semantic_space(&ok).unwrap();
        let bad = [SemanticLabel::new(0, "a", 0.3), SemanticLabel::new(1, "b", 0.6)];
        assert!(validate_semantic_space(&bad).is_err());
        let dup = [SemanticLabel::new(0, "a", 0.5), SemanticLabel::new(0, "b", 0.5)];
        assert!(validate_semantic_space(&dup).is_err());
    }
}
