use crate::error::Result;
use crate::rng::{layer_rng, Layer};
use crate::trajectory::{
    embed, lipschitz_certificate, LipschitzCertificate, PerturbationSampler, StatisticDescriptor,
    StatisticKind, WindowedTrajectory,
};

use super::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateRow {
    pub statistic: &'static str,
    /// "perturbation" for synthetic edit pairs, "chain" for protocol/arrival
    /// pairs of simulated sessions.
    pub sampler: &'static str,
    pub certificate: LipschitzCertificate,
}

/// Certificates of every registered statistic under the scenario's metric.
pub fn certify(cfg: &ScenarioConfig, pairs: usize) -> Result<Vec<CertificateRow>> {
    cfg.validate()?;
    let bundle = cfg.bundle()?;
    let sessions = pairs.min(cfg.trials).div_ceil(bundle.labels.len()).max(1);
    let mut chain_pairs: Vec<(WindowedTrajectory, WindowedTrajectory)> = Vec::new();
    for l in 0..bundle.labels.len() {
        for t in 0..sessions as u64 {
            let out = bundle.run(l, t)?;
            chain_pairs.push((embed(&out.plaintext, cfg.window)?, embed(&out.arrival, cfg.window)?));
        }
    }
    let sampler = PerturbationSampler {
        window: cfg.window,
        ..PerturbationSampler::default()
    };
    let mut rows = Vec::new();
    for key in StatisticKind::KEYS {
        let desc = StatisticDescriptor::from_key(key, cfg.metric, cfg.g_cap)?;
        let mut rng = layer_rng(cfg.seed, Layer::Sampler);
        let certificate = lipschitz_certificate(&desc, &cfg.metric, |r| sampler.pair(r), &mut rng, pairs)?;
        rows.push(CertificateRow {
            statistic: key,
            sampler: "perturbation",
            certificate,
        });
        let mut it = chain_pairs.iter().cycle();
        let certificate = lipschitz_certificate(
            &desc,
            &cfg.metric,
            |_| it.next().cloned().expect("non-empty"),
            &mut rng,
            chain_pairs.len(),
        )?;
        rows.push(CertificateRow {
            statistic: key,
            sampler: "chain",
            certificate,
        });
    }
    Ok(rows)
}

pub fn certificates_csv(rows: &[CertificateRow]) -> String {
    let mut s = String::from("statistic,sampler,pairs,max_ratio,declared_lipschitz,passes\n");
    for r in rows {
        let c = &r.certificate;
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.statistic, r.sampler, c.pairs, c.max_ratio, c.declared, c.passes
        ));
    }
    s
}
