//! The causal operators of the encrypted communication model: protocol
//! encapsulation, the encryption length transform, network transmission and
//! passive observation, plus their end-to-end composition.
//!
//! Payload bytes are never materialized. A packet is its timestamp, its total
//! length and its direction; every operator below reads and writes only those.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{layer_rng, Layer};
use crate::traffic::{generate_session, Direction, MessageSequence, SemanticLabel, TrafficProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerTag {
    Plaintext,
    Ciphertext,
    Arrival,
}

impl LayerTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            LayerTag::Plaintext => "plaintext",
            LayerTag::Ciphertext => "ciphertext",
            LayerTag::Arrival => "arrival",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub time: f64,
    pub length: u64,
    pub direction: Direction,
    /// Inserted by a cover-traffic defense; invisible to observers.
    #[serde(default)]
    pub cover: bool,
}

impl Packet {
    pub fn new(time: f64, length: u64, direction: Direction) -> Self {
        Self {
            time,
            length,
            direction,
            cover: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub label: u32,
    pub seed: u64,
}

/// Time-ordered marked point process of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPacketSequence {
    pub packets: Vec<Packet>,
    pub layer: LayerTag,
    pub window: f64,
    pub provenance: Provenance,
}

impl MarkedPacketSequence {
    pub fn total_bytes(&self) -> u64 {
        self.packets.iter().map(|p| p.length).sum()
    }

    fn expect_layer(&self, expected: LayerTag) -> Result<()> {
        if self.layer != expected {
            return Err(Error::LayerMismatch {
                expected: expected.as_str(),
                actual: self.layer.as_str(),
            });
        }
        Ok(())
    }
}

fn sort_by_time(packets: &mut [Packet]) {
    packets.sort_by(|a, b| a.time.total_cmp(&b.time));
}

/// Draws |N(0, sd^2)|, the normal law truncated at zero.
fn half_normal<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> f64 {
    if sd == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sd).expect("sd validated").sample(rng).abs()
}

fn check_nonneg(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, "must be finite and non-negative"))
    }
}

fn check_prob_open(field: &str, v: f64) -> Result<()> {
    if (0.0..1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(field, "must lie in [0, 1)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Segmentation {
    /// Each message is segmented as soon as it is produced.
    Eager,
    /// Same-direction messages are coalesced for up to `delay_ms`.
    NagleLike { delay_ms: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub mtu: u64,
    pub header_bytes: u64,
    pub segmentation: Segmentation,
    /// Standard deviation of the half-normal per-packet send delay, seconds.
    pub pacing_jitter_s: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            mtu: 1500,
            header_bytes: 40,
            segmentation: Segmentation::Eager,
            pacing_jitter_s: 0.0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mtu <= self.header_bytes {
            return Err(Error::invalid("protocol.mtu", "must exceed header_bytes"));
        }
        if let Segmentation::NagleLike { delay_ms } = self.segmentation {
            check_nonneg("protocol.segmentation.delay_ms", delay_ms)?;
        }
        check_nonneg("protocol.pacing_jitter_s", self.pacing_jitter_s)
    }

    pub fn payload_capacity(&self) -> u64 {
        self.mtu - self.header_bytes
    }
}

/// Segments and encapsulates a message sequence into plaintext packets.
pub fn encapsulate(
    msgs: &MessageSequence,
    cfg: &ProtocolConfig,
    seed: u64,
) -> Result<MarkedPacketSequence> {
    cfg.validate()?;
    if msgs.events.iter().any(|e| e.size == 0) {
        return Err(Error::invalid("message.size", "must be at least 1 byte"));
    }
    let mss = cfg.payload_capacity();
    let mut packets = Vec::new();
    let emit = |packets: &mut Vec<Packet>, t: f64, mut bytes: u64, dir: Direction| {
        while bytes > 0 {
            let chunk = bytes.min(mss);
            packets.push(Packet::new(t, chunk + cfg.header_bytes, dir));
            bytes -= chunk;
        }
    };

    match cfg.segmentation {
        Segmentation::Eager => {
            for e in &msgs.events {
                emit(&mut packets, e.time, e.size, e.direction);
            }
        }
        Segmentation::NagleLike { delay_ms } => {
            let delay = delay_ms / 1000.0;
            for dir in [Direction::Up, Direction::Down] {
                // (buffered bytes, time the oldest buffered byte arrived)
                let mut buf: Option<(u64, f64)> = None;
                for e in msgs.events.iter().filter(|e| e.direction == dir) {
                    if let Some((bytes, start)) = buf {
                        if e.time > start + delay {
                            emit(&mut packets, start + delay, bytes, dir);
                            buf = None;
                        }
                    }
                    let (mut bytes, start) = buf.map_or((e.size, e.time), |(b, s)| (b + e.size, s));
                    // full segments leave immediately
                    let full = bytes / mss * mss;
                    if full > 0 {
                        emit(&mut packets, e.time, full, dir);
                        bytes -= full;
                    }
                    buf = (bytes > 0).then_some((bytes, if full > 0 { e.time } else { start }));
                }
                if let Some((bytes, start)) = buf {
                    emit(&mut packets, start + delay, bytes, dir);
                }
            }
        }
    }

    if cfg.pacing_jitter_s > 0.0 {
        let mut rng = layer_rng(seed, Layer::Protocol);
        for p in &mut packets {
            p.time += half_normal(&mut rng, cfg.pacing_jitter_s);
        }
    }
    sort_by_time(&mut packets);

    Ok(MarkedPacketSequence {
        packets,
        layer: LayerTag::Plaintext,
        window: msgs.window,
        provenance: Provenance {
            label: msgs.label.id,
            seed,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PadPolicy {
    None,
    /// Round up to a multiple of the configured block size.
    PadToBlock,
    /// Pad every record to at least `target` bytes.
    PadToFixed { target: u64 },
    /// Append a uniform 0..=max_extra bytes.
    RandomPad { max_extra: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncryptionConfig {
    pub record_overhead: u64,
    pub block_size: u64,
    pub pad: PadPolicy,
    /// Per-packet processing delay, seconds.
    pub processing_delay_s: f64,
}

impl Default for EncryptionConfig {
    /// TLS 1.3 AEAD record framing: 5-byte header, 1-byte content type,
    /// 16-byte tag.
    fn default() -> Self {
        Self {
            record_overhead: 22,
            block_size: 16,
            pad: PadPolicy::None,
            processing_delay_s: 0.0,
        }
    }
}

impl EncryptionConfig {
    /// The identity transform.
    pub fn identity() -> Self {
        Self {
            record_overhead: 0,
            block_size: 1,
            pad: PadPolicy::None,
            processing_delay_s: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size == 0 {
            return Err(Error::invalid("encryption.block_size", "must be at least 1"));
        }
        check_nonneg("encryption.processing_delay_s", self.processing_delay_s)
    }

    /// Pad-to-fixed targets below the largest record the protocol can hand
    /// over would leave some lengths unpadded.
    pub fn validate_against(&self, proto: &ProtocolConfig) -> Result<()> {
        self.validate()?;
        if let PadPolicy::PadToFixed { target } = self.pad {
            let min = proto.mtu + self.record_overhead;
            if target < min {
                return Err(Error::invalid(
                    "encryption.pad.target",
                    format!("{target} is below the largest record ({min} bytes)"),
                ));
            }
        }
        Ok(())
    }

    /// Ciphertext length of a plaintext packet, for the deterministic policies.
    pub fn transformed_length(&self, len: u64) -> u64 {
        let sealed = len + self.record_overhead;
        match self.pad {
            PadPolicy::None | PadPolicy::RandomPad { .. } => sealed,
            PadPolicy::PadToBlock => sealed.div_ceil(self.block_size) * self.block_size,
            PadPolicy::PadToFixed { target } => sealed.max(target),
        }
    }
}

/// Applies the length transform and processing delay.
pub fn encrypt(pkts: &MarkedPacketSequence, cfg: &EncryptionConfig) -> Result<MarkedPacketSequence> {
    pkts.expect_layer(LayerTag::Plaintext)?;
    cfg.validate()?;
    let mut rng = layer_rng(pkts.provenance.seed, Layer::Encryption);
    let packets = pkts
        .packets
        .iter()
        .map(|p| {
            let mut length = cfg.transformed_length(p.length);
            if let PadPolicy::RandomPad { max_extra } = cfg.pad {
                length += rng.random_range(0..=max_extra);
            }
            Packet {
                time: p.time + cfg.processing_delay_s,
                length,
                ..*p
            }
        })
        .collect();
    Ok(MarkedPacketSequence {
        packets,
        layer: LayerTag::Ciphertext,
        window: pkts.window,
        provenance: pkts.provenance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub base_latency_s: f64,
    pub jitter_s: f64,
    pub loss: f64,
    pub retransmit_delay_s: f64,
    pub reorder: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            base_latency_s: 0.001,
            jitter_s: 0.0002,
            loss: 0.0,
            retransmit_delay_s: 0.05,
            reorder: 0.0,
        }
    }
}

impl NetworkConfig {
    pub fn identity() -> Self {
        Self {
            base_latency_s: 0.0,
            jitter_s: 0.0,
            loss: 0.0,
            retransmit_delay_s: 0.0,
            reorder: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("network.base_latency_s", self.base_latency_s)?;
        check_nonneg("network.jitter_s", self.jitter_s)?;
        check_nonneg("network.retransmit_delay_s", self.retransmit_delay_s)?;
        check_prob_open("network.loss", self.loss)?;
        check_prob_open("network.reorder", self.reorder)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TransmitStats {
    pub retransmitted: usize,
    pub swapped: usize,
}

/// Moves ciphertext packets across the network: base latency plus
/// half-normal jitter that keeps delivered packets in send order, loss with
/// one retransmission, then optional adjacent reordering.
pub fn transmit(
    pkts: &MarkedPacketSequence,
    cfg: &NetworkConfig,
    seed: u64,
) -> Result<MarkedPacketSequence> {
    transmit_with_stats(pkts, cfg, seed).map(|(s, _)| s)
}

/// As [`transmit`], also reporting how many packets were lost and resent.
pub fn transmit_with_stats(
    pkts: &MarkedPacketSequence,
    cfg: &NetworkConfig,
    seed: u64,
) -> Result<(MarkedPacketSequence, TransmitStats)> {
    pkts.expect_layer(LayerTag::Ciphertext)?;
    cfg.validate()?;
    let mut rng = layer_rng(seed, Layer::Network);
    let mut stats = TransmitStats::default();
    // delivered packets keep their send order; only resent ones may overtake
    let mut fifo = f64::NEG_INFINITY;
    let mut packets: Vec<Packet> = pkts
        .packets
        .iter()
        .map(|p| {
            let lost = cfg.loss > 0.0 && rng.random::<f64>() < cfg.loss;
            let mut time = p.time + cfg.base_latency_s + half_normal(&mut rng, cfg.jitter_s);
            if lost {
                stats.retransmitted += 1;
                time = p.time
                    + cfg.retransmit_delay_s
                    + cfg.base_latency_s
                    + half_normal(&mut rng, cfg.jitter_s);
            } else {
                time = time.max(fifo);
                fifo = time;
            }
            Packet { time, ..*p }
        })
        .collect();
    sort_by_time(&mut packets);

    if cfg.reorder > 0.0 {
        let mut i = 0;
        while i + 1 < packets.len() {
            if rng.random::<f64>() < cfg.reorder {
                let (a, b) = (packets[i].time, packets[i + 1].time);
                packets.swap(i, i + 1);
                packets[i].time = a;
                packets[i + 1].time = b;
                stats.swapped += 1;
                i += 2;
            } else {
                i += 1;
            }
        }
    }

    Ok((
        MarkedPacketSequence {
            packets,
            layer: LayerTag::Arrival,
            window: pkts.window,
            provenance: pkts.provenance,
        },
        stats,
    ))
}

/// Which parts of the arrival process the observer may record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureSet {
    pub lengths: bool,
    pub times: bool,
    pub directions: bool,
    pub aggregates: bool,
}

impl Default for FeatureSet {
    fn default() -> Self {
        Self {
            lengths: true,
            times: true,
            directions: true,
            aggregates: true,
        }
    }
}

impl FeatureSet {
    pub fn aggregates_only() -> Self {
        Self {
            lengths: false,
            times: false,
            directions: false,
            aggregates: true,
        }
    }

    fn any_per_packet(&self) -> bool {
        self.lengths || self.times || self.directions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservationConfig {
    /// Timestamp granule in seconds; 0 records exact times.
    pub time_granule_s: f64,
    /// Length granule in bytes; 0 or 1 records exact lengths.
    pub length_granule_bytes: u64,
    pub keep_probability: f64,
    pub features: FeatureSet,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self {
            time_granule_s: 0.001,
            length_granule_bytes: 1,
            keep_probability: 1.0,
            features: FeatureSet::default(),
        }
    }
}

impl ObservationConfig {
    pub fn lossless() -> Self {
        Self {
            time_granule_s: 0.0,
            length_granule_bytes: 0,
            keep_probability: 1.0,
            features: FeatureSet::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("observation.time_granule_s", self.time_granule_s)?;
        if !(self.keep_probability > 0.0 && self.keep_probability <= 1.0) {
            return Err(Error::invalid("observation.keep_probability", "must lie in (0, 1]"));
        }
        Ok(())
    }

    fn quantize_time(&self, t: f64) -> f64 {
        if self.time_granule_s > 0.0 {
            (t / self.time_granule_s).floor() * self.time_granule_s
        } else {
            t
        }
    }

    fn quantize_length(&self, l: u64) -> u64 {
        match self.length_granule_bytes {
            0 | 1 => l,
            g => l / g * g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedPacket {
    pub time: Option<f64>,
    pub length: Option<u64>,
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowAggregates {
    pub total_bytes: u64,
    pub packet_count: u64,
    pub up_count: u64,
    pub down_count: u64,
    /// (last - first) / (count - 1); absent with fewer than two packets.
    pub mean_inter_arrival: Option<f64>,
}

/// Observed feature vector Y of one session window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub packets: Option<Vec<ObservedPacket>>,
    pub aggregates: Option<WindowAggregates>,
}

/// Extracts features from the arrival process inside `[0, window]`.
pub fn observe(
    pkts: &MarkedPacketSequence,
    cfg: &ObservationConfig,
    seed: u64,
) -> Result<FeatureRecord> {
    pkts.expect_layer(LayerTag::Arrival)?;
    cfg.validate()?;
    let mut rng = layer_rng(seed, Layer::Observation);
    let mut kept: Vec<(f64, u64, Direction)> = Vec::new();
    for p in pkts.packets.iter().filter(|p| p.time >= 0.0 && p.time <= pkts.window) {
        // one draw per packet regardless of keep probability
        let u: f64 = rng.random();
        if u < cfg.keep_probability {
            kept.push((cfg.quantize_time(p.time), cfg.quantize_length(p.length), p.direction));
        }
    }

    let packets = cfg.features.any_per_packet().then(|| {
        kept.iter()
            .map(|&(t, l, d)| ObservedPacket {
                time: cfg.features.times.then_some(t),
                length: cfg.features.lengths.then_some(l),
                direction: cfg.features.directions.then_some(d),
            })
            .collect()
    });
    let aggregates = cfg.features.aggregates.then(|| {
        let up = kept.iter().filter(|k| k.2 == Direction::Up).count() as u64;
        let n = kept.len() as u64;
        WindowAggregates {
            total_bytes: kept.iter().map(|k| k.1).sum(),
            packet_count: n,
            up_count: up,
            down_count: n - up,
            mean_inter_arrival: (n >= 2)
                .then(|| (kept[kept.len() - 1].0 - kept[0].0) / (n - 1) as f64),
        }
    });
    Ok(FeatureRecord {
        packets,
        aggregates,
    })
}

/// Defense vector applied between the encryption and network layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefenseParams {
    /// Replaces the encryption pad policy when set.
    pub pad: Option<PadPolicy>,
    /// Constant delay added to every packet, seconds.
    pub added_delay_s: f64,
    /// Cover packets per second, per direction, inserted uniformly.
    pub cover_rate: f64,
}

impl Default for DefenseParams {
    fn default() -> Self {
        Self::none()
    }
}

impl DefenseParams {
    pub const fn none() -> Self {
        Self {
            pad: None,
            added_delay_s: 0.0,
            cover_rate: 0.0,
        }
    }

    pub fn is_none(&self) -> bool {
        self.pad.is_none() && self.added_delay_s == 0.0 && self.cover_rate == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("defense.added_delay_s", self.added_delay_s)?;
        check_nonneg("defense.cover_rate", self.cover_rate)
    }
}

/// Inserts cover packets into a ciphertext sequence. Cover lengths are
/// resampled from the session's own ciphertext lengths.
pub fn insert_cover(pkts: &mut MarkedPacketSequence, rate: f64, fallback_len: u64) {
    if rate <= 0.0 {
        return;
    }
    let mut rng = layer_rng(pkts.provenance.seed, Layer::Defense);
    let pool: Vec<u64> = pkts.packets.iter().map(|p| p.length).collect();
    let count = Poisson::new(rate * pkts.window).expect("positive mean");
    for dir in [Direction::Up, Direction::Down] {
        let k = count.sample(&mut rng) as usize;
        for _ in 0..k {
            let time = rng.random::<f64>() * pkts.window;
            let length = if pool.is_empty() {
                fallback_len
            } else {
                pool[rng.random_range(0..pool.len())]
            };
            pkts.packets.push(Packet {
                time,
                length,
                direction: dir,
                cover: true,
            });
        }
    }
    sort_by_time(&mut pkts.packets);
}

/// Everything needed to push one session through the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub protocol: ProtocolConfig,
    pub encryption: EncryptionConfig,
    pub network: NetworkConfig,
    pub observation: ObservationConfig,
    pub defense: DefenseParams,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            protocol: ProtocolConfig::default(),
            encryption: EncryptionConfig::default(),
            network: NetworkConfig::default(),
            observation: ObservationConfig::default(),
            defense: DefenseParams::none(),
        }
    }
}

impl ChainConfig {
    /// Identity transform at every layer after encapsulation.
    pub fn identity() -> Self {
        Self {
            protocol: ProtocolConfig::default(),
            encryption: EncryptionConfig::identity(),
            network: NetworkConfig::identity(),
            observation: ObservationConfig::lossless(),
            defense: DefenseParams::none(),
        }
    }

    /// Encryption settings after the defense override.
    pub fn effective_encryption(&self) -> EncryptionConfig {
        let mut enc = self.encryption;
        if let Some(pad) = self.defense.pad {
            enc.pad = pad;
        }
        enc.processing_delay_s += self.defense.added_delay_s;
        enc
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        self.effective_encryption().validate_against(&self.protocol)?;
        self.network.validate()?;
        self.observation.validate()?;
        self.defense.validate()
    }
}

/// All layers of one end-to-end pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub messages: MessageSequence,
    pub plaintext: MarkedPacketSequence,
    pub ciphertext: MarkedPacketSequence,
    pub arrival: MarkedPacketSequence,
    pub features: FeatureRecord,
}

/// Runs X -> application -> protocol -> encryption -> network -> observation
/// for one session. Every layer draws from its own split of `seed`.
pub fn run_chain(
    label: &SemanticLabel,
    profile: &TrafficProfile,
    cfg: &ChainConfig,
    window: f64,
    seed: u64,
) -> Result<ChainOutput> {
    cfg.validate()?;
    let messages = generate_session(label, profile, window, seed)?;
    let plaintext = encapsulate(&messages, &cfg.protocol, seed)?;
    let mut ciphertext = encrypt(&plaintext, &cfg.effective_encryption())?;
    insert_cover(&mut ciphertext, cfg.defense.cover_rate, cfg.protocol.mtu);
    let arrival = transmit(&ciphertext, &cfg.network, seed)?;
    let features = observe(&arrival, &cfg.observation, seed)?;
    Ok(ChainOutput {
        messages,
        plaintext,
        ciphertext,
        arrival,
        features,
    })
}
