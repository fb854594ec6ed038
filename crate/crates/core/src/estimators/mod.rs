//! Estimation: Monte Carlo estimates of the leakage-theorem parameters,
//! histogram estimators on feature samples, and exact discrete oracles.

pub mod discrete;
pub mod empirical;
pub mod montecarlo;

pub use discrete::{
    entropy_bits, exact_bayes_error, exact_chernoff, exact_mi, exact_tv, prior_entropy,
    product_channel, tv_distance, Chernoff, DiscreteChannel, DEFAULT_PRODUCT_CAP,
};
pub use empirical::{
    bayes_accuracy, bayes_accuracy_weighted, default_bins, empirical_tv, plugin_mi,
    plugin_mi_estimate, plugin_mi_weighted, split_holdout, AccuracyEstimate, Binning,
    HistogramClassifier, MiEstimate,
};
pub use montecarlo::{
    estimate_c, estimate_delta_bar, estimate_rho, gap_estimate, mean_estimate, ChainBundle,
    PairEstimate, RhoEstimate, TrialRecord, TrialSet,
};

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;
