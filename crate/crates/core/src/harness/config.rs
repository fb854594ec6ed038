//! Scenario files.
//!
//! A scenario is a TOML document with the sections below. Every key is
//! optional unless marked; unknown keys are rejected with the nearest valid
//! key as a suggestion.
//!
//! ```toml
//! [scenario]
//! name = "video-vs-web"
//! window_s = 10.0            # observation window T, seconds
//! trials = 2000              # per label, at least 100
//! seed = 7
//! phi = "clipped_total_bytes"
//! psi = "clipped_total_bytes" # defaults to phi
//! g_cap = 1.0                # clip of clipped_mean_gap, seconds
//! pair = [0, 1]              # label indices compared by the bounds
//! bins = 0                   # histogram bins, 0 picks n^(1/3)
//! holdout = 0.3
//! objective = "empirical_mi" # or "bound"
//! dump_trials = 3
//!
//! [[labels]]                 # at least two
//! id = 0
//! name = "video"
//! prior = 0.5
//! profile = "video"          # preset name or an inline profile table
//!
//! [protocol]     # mtu, header_bytes, segmentation = { policy, delay_ms }, pacing_jitter_s
//! [encryption]   # record_overhead, block_size, pad = { policy, target, max_extra }, processing_delay_s
//! [network]      # base_latency_s, jitter_s, loss, retransmit_delay_s, reorder
//! [observation]  # time_granule_s, length_granule_bytes, keep_probability, features = { ... }
//! [metric]       # w_len, w_cnt, w_time, w_dir, s_cap
//! [defense]      # pad, added_delay_s, cover_rate
//! [sweep]        # max_overhead, max_latency_s, [[sweep.grid]] of defense tables
//! [multisession] # sessions = [1, 2, 4]
//! [oracle]       # channel = "<DiscreteChannel text>", pair = [0, 1]
//! ```

use serde::de::DeserializeOwned;
use toml::{Table, Value};

use crate::channel_ops::{
    ChainConfig, DefenseParams, EncryptionConfig, NetworkConfig, ObservationConfig, ProtocolConfig,
};
use crate::error::{Error, Result};
use crate::estimators::{ChainBundle, DiscreteChannel};
use crate::traffic::{preset, validate_semantic_space, SemanticLabel, TrafficProfile, DEFAULT_WINDOW_S};
use crate::trajectory::{MetricConfig, ObservationStatistic, StatisticDescriptor, DEFAULT_G_CAP};

pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    EmpiricalMi,
    Bound,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::EmpiricalMi => "empirical_mi",
            Objective::Bound => "bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelSpec {
    pub label: SemanticLabel,
    pub profile: TrafficProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub max_overhead: f64,
    pub max_latency_s: f64,
    pub grid: Vec<DefenseParams>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            max_overhead: 0.5,
            max_latency_s: 0.05,
            grid: default_grid(),
        }
    }
}

/// θ = 0, padding, delay and cover points.
pub fn default_grid() -> Vec<DefenseParams> {
    use crate::channel_ops::PadPolicy;
    let mut g = vec![DefenseParams::none()];
    for pad in [
        PadPolicy::PadToBlock,
        PadPolicy::RandomPad { max_extra: 256 },
        PadPolicy::PadToFixed { target: 1522 },
    ] {
        g.push(DefenseParams {
            pad: Some(pad),
            ..DefenseParams::none()
        });
    }
    for d in [0.01, 0.05] {
        g.push(DefenseParams {
            added_delay_s: d,
            ..DefenseParams::none()
        });
    }
    for r in [5.0, 50.0] {
        g.push(DefenseParams {
            cover_rate: r,
            ..DefenseParams::none()
        });
    }
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    pub channel: DiscreteChannel,
    pub pair: (usize, usize),
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub window: f64,
    pub trials: usize,
    pub seed: u64,
    pub phi: String,
    pub psi: String,
    pub g_cap: f64,
    pub pair: (usize, usize),
    /// 0 selects the default bin count.
    pub bins: usize,
    pub holdout: f64,
    pub objective: Objective,
    pub dump_trials: usize,
    pub labels: Vec<LabelSpec>,
    pub chain: ChainConfig,
    pub metric: MetricConfig,
    pub sweep: SweepSpec,
    pub sessions: Vec<usize>,
    pub oracle: Option<OracleSpec>,
}

impl ScenarioConfig {
    /// Video against web browsing with equal priors and default layers.
    pub fn video_vs_web() -> Self {
        let labels = [(0, "video"), (1, "web")]
            .into_iter()
            .map(|(id, name)| LabelSpec {
                label: SemanticLabel::new(id, name, 0.5),
                profile: preset(name).expect("shipped preset"),
            })
            .collect();
        Self {
            name: "video-vs-web".into(),
            window: DEFAULT_WINDOW_S,
            trials: 2000,
            seed: 7,
            phi: "clipped_total_bytes".into(),
            psi: "clipped_total_bytes".into(),
            g_cap: DEFAULT_G_CAP,
            pair: (0, 1),
            bins: 0,
            holdout: 0.3,
            objective: Objective::EmpiricalMi,
            dump_trials: 3,
            labels,
            chain: ChainConfig::default(),
            metric: MetricConfig::default(),
            sweep: SweepSpec::default(),
            sessions: vec![1, 2, 4, 8],
            oracle: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse {
            line: e.span().map_or(0, |s| line_of(text, s.start)),
            reason: e.message().to_string(),
        })?;
        check_keys(&table, ROOT, "")?;
        let mut cfg = Self::video_vs_web();
        if let Some(s) = table.get("scenario") {
            let s = s.as_table().expect("checked");
            cfg.name = get(s, "scenario.name", "name", cfg.name)?;
            cfg.window = get(s, "scenario.window_s", "window_s", cfg.window)?;
            cfg.trials = get(s, "scenario.trials", "trials", cfg.trials)?;
            cfg.seed = get(s, "scenario.seed", "seed", cfg.seed)?;
            cfg.phi = get(s, "scenario.phi", "phi", cfg.phi)?;
            cfg.psi = get(s, "scenario.psi", "psi", cfg.phi.clone())?;
            cfg.g_cap = get(s, "scenario.g_cap", "g_cap", cfg.g_cap)?;
            let pair: [usize; 2] = get(s, "scenario.pair", "pair", [cfg.pair.0, cfg.pair.1])?;
            cfg.pair = (pair[0], pair[1]);
            cfg.bins = get(s, "scenario.bins", "bins", cfg.bins)?;
            cfg.holdout = get(s, "scenario.holdout", "holdout", cfg.holdout)?;
            cfg.dump_trials = get(s, "scenario.dump_trials", "dump_trials", cfg.dump_trials)?;
            let obj: String = get(s, "scenario.objective", "objective", cfg.objective.as_str().to_string())?;
            cfg.objective = match obj.as_str() {
                "empirical_mi" => Objective::EmpiricalMi,
                "bound" => Objective::Bound,
                other => {
                    return Err(Error::invalid(
                        "scenario.objective",
                        format!("`{other}` is not one of empirical_mi, bound"),
                    ))
                }
            };
        }
        if let Some(labels) = table.get("labels") {
            cfg.labels = labels
                .as_array()
                .expect("checked")
                .iter()
                .enumerate()
                .map(|(i, v)| parse_label(i, v.as_table().expect("checked")))
                .collect::<Result<_>>()?;
        }
        cfg.chain.protocol = section::<ProtocolConfig>(&table, "protocol")?.unwrap_or_default();
        cfg.chain.encryption = section::<EncryptionConfig>(&table, "encryption")?.unwrap_or_default();
        cfg.chain.network = section::<NetworkConfig>(&table, "network")?.unwrap_or_default();
        cfg.chain.observation = section::<ObservationConfig>(&table, "observation")?.unwrap_or_default();
        cfg.chain.defense = section::<DefenseParams>(&table, "defense")?.unwrap_or_default();
        cfg.metric = section::<MetricConfig>(&table, "metric")?.unwrap_or_default();
        if let Some(s) = table.get("sweep") {
            let s = s.as_table().expect("checked");
            cfg.sweep.max_overhead = get(s, "sweep.max_overhead", "max_overhead", cfg.sweep.max_overhead)?;
            cfg.sweep.max_latency_s = get(s, "sweep.max_latency_s", "max_latency_s", cfg.sweep.max_latency_s)?;
            if s.contains_key("grid") {
                cfg.sweep.grid = get(s, "sweep.grid", "grid", Vec::new())?;
            }
        }
        if let Some(s) = table.get("multisession") {
            let s = s.as_table().expect("checked");
            cfg.sessions = get(s, "multisession.sessions", "sessions", cfg.sessions)?;
        }
        if let Some(s) = table.get("oracle") {
            let s = s.as_table().expect("checked");
            let text: String = get(s, "oracle.channel", "channel", String::new())?;
            if text.is_empty() {
                return Err(Error::invalid("oracle.channel", "required in an [oracle] section"));
            }
            let pair: [usize; 2] = get(s, "oracle.pair", "pair", [0, 1])?;
            cfg.oracle = Some(OracleSpec {
                channel: DiscreteChannel::from_text(&text)?,
                pair: (pair[0], pair[1]),
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let labels: Vec<SemanticLabel> = self.labels.iter().map(|l| l.label.clone()).collect();
        validate_semantic_space(&labels)?;
        for l in &self.labels {
            l.profile.validate()?;
        }
        if !(self.window.is_finite() && self.window > 0.0) {
            return Err(Error::invalid("scenario.window_s", "must be positive"));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::invalid(
                "scenario.trials",
                format!("{} is below the minimum of {MIN_TRIALS}", self.trials),
            ));
        }
        let (a, b) = self.pair;
        if a == b || a >= self.labels.len() || b >= self.labels.len() {
            return Err(Error::invalid("scenario.pair", "must name two distinct labels"));
        }
        if self.bins == 1 {
            return Err(Error::invalid("scenario.bins", "use 0 (automatic) or at least 2"));
        }
        if !(self.holdout > 0.0 && self.holdout < 1.0) {
            return Err(Error::invalid("scenario.holdout", "must lie in (0, 1)"));
        }
        self.chain.validate()?;
        self.metric.validate()?;
        self.descriptors()?;
        if !(self.sweep.max_overhead >= 0.0 && self.sweep.max_latency_s >= 0.0) {
            return Err(Error::invalid("sweep", "constraints must be non-negative"));
        }
        if self.sweep.grid.is_empty() {
            return Err(Error::invalid("sweep.grid", "must not be empty"));
        }
        for d in &self.sweep.grid {
            let mut chain = self.chain.clone();
            chain.defense = *d;
            chain.validate()?;
        }
        if self.sessions.is_empty() || self.sessions.contains(&0) {
            return Err(Error::invalid("multisession.sessions", "need session counts of at least 1"));
        }
        if let Some(o) = &self.oracle {
            let (x, y) = o.pair;
            if x == y || x >= o.channel.inputs() || y >= o.channel.inputs() {
                return Err(Error::invalid("oracle.pair", "must name two distinct channel inputs"));
            }
        }
        Ok(())
    }

    /// φ and ψ descriptors for the configured statistic keys.
    pub fn descriptors(&self) -> Result<(StatisticDescriptor, ObservationStatistic)> {
        let phi = StatisticDescriptor::from_key(&self.phi, self.metric, self.g_cap)?;
        let psi = StatisticDescriptor::from_key(&self.psi, self.metric, self.g_cap)?;
        Ok((phi, ObservationStatistic::matching(&psi)))
    }

    pub fn bundle(&self) -> Result<ChainBundle> {
        let (phi, psi) = self.descriptors()?;
        Ok(ChainBundle {
            labels: self.labels.iter().map(|l| l.label.clone()).collect(),
            profiles: self.labels.iter().map(|l| l.profile.clone()).collect(),
            chain: self.chain.clone(),
            window: self.window,
            metric: self.metric,
            phi,
            psi,
            master_seed: self.seed,
        })
    }

    /// Same scenario with a different defense vector.
    pub fn with_defense(&self, defense: DefenseParams) -> Self {
        let mut c = self.clone();
        c.chain.defense = defense;
        c
    }

    pub fn priors(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.label.prior).collect()
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn get<T: DeserializeOwned>(t: &Table, field: &str, key: &str, default: T) -> Result<T> {
    match t.get(key) {
        None => Ok(default),
        Some(v) => v
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::invalid(field, e.message().trim())),
    }
}

fn section<T: DeserializeOwned>(t: &Table, name: &str) -> Result<Option<T>> {
    t.get(name)
        .map(|v| {
            v.clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::invalid(name, e.message().trim()))
        })
        .transpose()
}

fn parse_label(i: usize, t: &Table) -> Result<LabelSpec> {
    let field = |k: &str| format!("labels[{i}].{k}");
    let id: u32 = get(t, &field("id"), "id", i as u32)?;
    let name: String = get(t, &field("name"), "name", format!("label{id}"))?;
    let prior: f64 = match t.get("prior") {
        Some(_) => get(t, &field("prior"), "prior", 0.0)?,
        None => return Err(Error::invalid(field("prior"), "required")),
    };
    let profile = match t.get("profile") {
        None => preset(&name).ok_or_else(|| {
            Error::invalid(field("profile"), format!("required: `{name}` is not a preset name"))
        })?,
        Some(Value::String(p)) => preset(p).ok_or_else(|| {
            Error::invalid(
                field("profile"),
                format!("unknown preset `{p}`; known: video, web, chat, bulk"),
            )
        })?,
        Some(v) => v
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::invalid(field("profile"), e.message().trim()))?,
    };
    Ok(LabelSpec {
        label: SemanticLabel::new(id, name, prior),
        profile,
    })
}

/// Key schema used to reject unknown keys before deserialization.
enum Node {
    Leaf,
    Table(&'static [(&'static str, Node)]),
    TableArray(&'static [(&'static str, Node)]),
    /// A string or a table with the given keys.
    LeafOrTable(&'static [(&'static str, Node)]),
}

const PAD: &[(&str, Node)] = &[("policy", Node::Leaf), ("target", Node::Leaf), ("max_extra", Node::Leaf)];
const SIZE: &[(&str, Node)] = &[
    ("family", Node::Leaf),
    ("mu", Node::Leaf),
    ("sigma", Node::Leaf),
    ("scale", Node::Leaf),
    ("shape", Node::Leaf),
    ("cap", Node::Leaf),
    ("bytes", Node::Leaf),
];
const PROFILE: &[(&str, Node)] = &[
    ("kind", Node::Leaf),
    ("burst_rate", Node::Leaf),
    ("size", Node::Table(SIZE)),
    ("up_fraction", Node::Leaf),
    ("duty_on", Node::Leaf),
    ("cycle_period", Node::Leaf),
];
const DEFENSE: &[(&str, Node)] = &[
    ("pad", Node::Table(PAD)),
    ("added_delay_s", Node::Leaf),
    ("cover_rate", Node::Leaf),
];
const ROOT: &[(&str, Node)] = &[
    (
        "scenario",
        Node::Table(&[
            ("name", Node::Leaf),
            ("window_s", Node::Leaf),
            ("trials", Node::Leaf),
            ("seed", Node::Leaf),
            ("phi", Node::Leaf),
            ("psi", Node::Leaf),
            ("g_cap", Node::Leaf),
            ("pair", Node::Leaf),
            ("bins", Node::Leaf),
            ("holdout", Node::Leaf),
            ("objective", Node::Leaf),
            ("dump_trials", Node::Leaf),
        ]),
    ),
    (
        "labels",
        Node::TableArray(&[
            ("id", Node::Leaf),
            ("name", Node::Leaf),
            ("prior", Node::Leaf),
            ("profile", Node::LeafOrTable(PROFILE)),
        ]),
    ),
    (
        "protocol",
        Node::Table(&[
            ("mtu", Node::Leaf),
            ("header_bytes", Node::Leaf),
            ("segmentation", Node::Table(&[("policy", Node::Leaf), ("delay_ms", Node::Leaf)])),
            ("pacing_jitter_s", Node::Leaf),
        ]),
    ),
    (
        "encryption",
        Node::Table(&[
            ("record_overhead", Node::Leaf),
            ("block_size", Node::Leaf),
            ("pad", Node::Table(PAD)),
            ("processing_delay_s", Node::Leaf),
        ]),
    ),
    (
        "network",
        Node::Table(&[
            ("base_latency_s", Node::Leaf),
            ("jitter_s", Node::Leaf),
            ("loss", Node::Leaf),
            ("retransmit_delay_s", Node::Leaf),
            ("reorder", Node::Leaf),
        ]),
    ),
    (
        "observation",
        Node::Table(&[
            ("time_granule_s", Node::Leaf),
            ("length_granule_bytes", Node::Leaf),
            ("keep_probability", Node::Leaf),
            (
                "features",
                Node::Table(&[
                    ("lengths", Node::Leaf),
                    ("times", Node::Leaf),
                    ("directions", Node::Leaf),
                    ("aggregates", Node::Leaf),
                ]),
            ),
        ]),
    ),
    (
        "metric",
        Node::Table(&[
            ("w_len", Node::Leaf),
            ("w_cnt", Node::Leaf),
            ("w_time", Node::Leaf),
            ("w_dir", Node::Leaf),
            ("s_cap", Node::Leaf),
        ]),
    ),
    ("defense", Node::Table(DEFENSE)),
    (
        "sweep",
        Node::Table(&[
            ("max_overhead", Node::Leaf),
            ("max_latency_s", Node::Leaf),
            ("grid", Node::TableArray(DEFENSE)),
        ]),
    ),
    ("multisession", Node::Table(&[("sessions", Node::Leaf)])),
    ("oracle", Node::Table(&[("channel", Node::Leaf), ("pair", Node::Leaf)])),
];

fn check_keys(t: &Table, schema: &[(&str, Node)], path: &str) -> Result<()> {
    let section = if path.is_empty() { "<root>" } else { path };
    for (k, v) in t {
        let Some((_, node)) = schema.iter().find(|(name, _)| name == k) else {
            let suggestion = schema
                .iter()
                .map(|(name, _)| (strsim::jaro_winkler(k, name), *name))
                .filter(|(score, _)| *score > 0.7)
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, name)| name.to_string());
            return Err(Error::UnknownKey {
                section: section.to_string(),
                key: k.clone(),
                suggestion,
            });
        };
        let child = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
        let expect = |what: &str| Error::invalid(child.clone(), format!("expected {what}"));
        match node {
            Node::Leaf => {}
            Node::Table(s) => check_keys(v.as_table().ok_or_else(|| expect("a table"))?, s, &child)?,
            Node::TableArray(s) => {
                let arr = v.as_array().ok_or_else(|| expect("an array of tables"))?;
                for (i, item) in arr.iter().enumerate() {
                    let t = item.as_table().ok_or_else(|| expect("an array of tables"))?;
                    check_keys(t, s, &format!("{child}[{i}]"))?;
                }
            }
            Node::LeafOrTable(s) => {
                if let Some(t) = v.as_table() {
                    check_keys(t, s, &child)?;
                }
            }
        }
    }
    Ok(())
}
