//! Acceptance criteria. Each check prints one PASS/FAIL line; the test fails
//! on any FAIL except the two known-unattainable literal claims, whose true
//! behaviour is asserted instead.

use std::f64::consts::LN_2;

use leaklab::bounds::{build_report, fano_binary_error_lower_bound, BoundInputs};
use leaklab::estimators::{
    exact_bayes_error, exact_chernoff, exact_mi, exact_tv, product_channel, DiscreteChannel,
    DEFAULT_PRODUCT_CAP,
};
use leaklab::harness::{
    bsc_spec, dpi_check, multi_session_experiment, oracle_sessions, oracle_suite, output, run_scenario,
    OracleSettings, ScenarioConfig,
};

fn line(id: u32, ok: bool, detail: String) -> bool {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Independent bisection on the binary entropy, lower branch.
fn h2_inverse(h: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact k-fold BSC Bayes error with equal priors: majority vote, ties cost ½.
fn bsc_error(eps: f64, k: u64) -> f64 {
    (0..=k)
        .map(|j| {
            let p = binom(k, j) * eps.powi(j as i32) * (1.0 - eps).powi((k - j) as i32);
            if 2 * j > k {
                p
            } else if 2 * j == k {
                0.5 * p
            } else {
                0.0
            }
        })
        .sum()
}

fn criterion_1() -> bool {
    let r = build_report(&BoundInputs::equal_priors(1.0, 0.2, 1.0, 0.8, 1.0), None).unwrap();
    let mi_formula = 0.24f64.powi(2) / (2.0 * LN_2);
    let ok = (r.acc_lb - 0.62).abs() <= 1e-12 && (r.mi_lb_equal_prior_bits - mi_formula).abs() <= 1e-9;
    line(
        1,
        ok,
        format!("acc_lb = {} (0.62), mi_lb_equal_prior = {} ({mi_formula})", r.acc_lb, r.mi_lb_equal_prior_bits),
    )
}

fn criterion_2() -> bool {
    let v = fano_binary_error_lower_bound(0.1).unwrap();
    let oracle = h2_inverse(0.9);
    let literal = (0.3165..=0.3175).contains(&v);
    line(
        2,
        literal,
        format!("fano_binary(0.1) = {v}, band [0.3165, 0.3175]; independent inverse of H2 at 0.9 = {oracle}"),
    );
    if !literal {
        println!("criterion 2: known unattainable, the band excludes the true inverse; see the decisions ledger");
    }
    (v - oracle).abs() < 1e-9
}

fn criterion_3() -> bool {
    let s = oracle_suite(OracleSettings::default()).unwrap();
    let stats = s.count("tv_from_expectation");
    let ok = s.passed() && s.settings.channels >= 1000 && stats >= 10_000;
    line(
        3,
        ok,
        format!("{} channels, {stats} statistics, {} violations {:?}", s.settings.channels, s.violations.len(), s.checks),
    )
}

fn criterion_4() -> bool {
    let ch = DiscreteChannel::bsc(0.1).unwrap();
    let tv = exact_tv(&ch, 0, 1).unwrap();
    let mi = exact_mi(&ch);
    let pe = exact_bayes_error(&ch);
    let c = exact_chernoff(ch.row(0), ch.row(1), 1e-10).unwrap().nats();
    let pe3 = exact_bayes_error(&product_channel(&ch, 3, DEFAULT_PRODUCT_CAP).unwrap());
    let ok = (tv - 0.8).abs() < 1e-12
        && (mi - 0.531).abs() <= 1e-3
        && (mi - (1.0 - h2(0.1))).abs() < 1e-12
        && (pe - 0.1).abs() < 1e-12
        && (c - 0.5108).abs() <= 1e-4
        && (pe3 - 0.028).abs() <= 1e-12;
    line(4, ok, format!("tv {tv}, mi {mi}, pe {pe}, chernoff {c}, pe(n=3) {pe3}"))
}

fn criterion_5() -> bool {
    let cfg = ScenarioConfig {
        trials: 10_000,
        ..ScenarioConfig::video_vs_web()
    };
    let r = run_scenario(&cfg).unwrap();
    let s = dpi_check(&cfg).unwrap();
    let ok = r.report.mi_lb_bits <= r.empirical_mi.bits
        && r.report.acc_lb <= r.accuracy.accuracy
        && s.nonincreasing
        && r.empirical_mi.excludes_zero();
    let series: Vec<String> = s.layers.iter().map(|l| format!("{}={}", l.layer, l.mi.bits)).collect();
    line(
        5,
        ok,
        format!(
            "mi_lb {} <= mi {} [{}, {}], acc_lb {} <= acc {}, dpi [{}]",
            r.report.mi_lb_bits,
            r.empirical_mi.bits,
            r.empirical_mi.lo,
            r.empirical_mi.hi,
            r.report.acc_lb,
            r.accuracy.accuracy,
            series.join(" ")
        ),
    )
}

fn criterion_6() -> bool {
    let mut rows = Vec::new();
    for jitter in [0.0002, 0.001, 0.002, 0.003, 0.004, 0.005, 0.01, 0.05] {
        let mut cfg = ScenarioConfig::video_vs_web();
        cfg.chain.network.jitter_s = jitter;
        let r = run_scenario(&cfg).unwrap();
        rows.push((jitter, r.inputs.c, r.inputs.delta_bar / (2.0 * r.inputs.l_phi), r.report));
    }
    let first_ok = rows[0].3.condition_v_ok;
    let crosses = rows.iter().any(|r| r.1 >= r.2 && !r.3.condition_v_ok);
    let flip_is_exact = rows.iter().all(|r| r.3.condition_v_ok == (r.1 < r.2));
    let vacuous = rows
        .iter()
        .filter(|r| !r.3.condition_v_ok)
        .all(|r| r.3.mi_lb_bits == 0.0 && r.3.tv_lb == 0.0 && r.3.acc_lb == 0.5);
    let mut by_c = rows.clone();
    by_c.sort_by(|a, b| a.1.total_cmp(&b.1));
    let monotone = by_c.windows(2).all(|w| w[1].3.mi_lb_bits <= w[0].3.mi_lb_bits);
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("jitter {} C {:.4} thr {:.4} mi_lb {:.5}", r.0, r.1, r.2, r.3.mi_lb_bits))
        .collect();
    line(
        6,
        first_ok && crosses && flip_is_exact && vacuous && monotone,
        format!("[{}]", table.join("; ")),
    )
}

fn criterion_7() -> bool {
    let ks: Vec<usize> = (2..=12).collect();
    let rows = oracle_sessions(&bsc_spec(0.1).unwrap(), &ks).unwrap();
    let chernoff = rows[0].chernoff_nats;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].bayes_error < w[0].bayes_error);
    let exponent_up = rows.windows(2).all(|w| w[1].exponent_nats >= w[0].exponent_nats);
    let literal = strictly_decreasing && exponent_up;
    let series: Vec<String> = rows
        .iter()
        .map(|r| format!("k={} pe={:e} exp={:.4}", r.sessions, r.bayes_error, r.exponent_nats))
        .collect();
    line(7, literal, format!("oracle BSC(0.1) [{}], chernoff {chernoff}", series.join(" ")));
    if !literal {
        println!("criterion 7: known unattainable, P_e(2m) = P_e(2m-1) and the exponent falls toward Chernoff from above; see the decisions ledger");
    }
    let matches_binomial = rows
        .iter()
        .all(|r| (r.bayes_error - bsc_error(0.1, r.sessions as u64)).abs() < 1e-12);
    let nonincreasing = rows.windows(2).all(|w| w[1].bayes_error <= w[0].bayes_error + 1e-12);
    let above_chernoff = rows.iter().all(|r| r.exponent_nats > chernoff);
    let parity_decreasing = rows.windows(3).all(|w| w[2].exponent_nats < w[0].exponent_nats);
    let oracle_true = matches_binomial && nonincreasing && above_chernoff && parity_decreasing;
    println!(
        "criterion 7: oracle properties that hold: binomial match {matches_binomial}, P_e nonincreasing {nonincreasing}, exponent above Chernoff {above_chernoff}, exponent decreasing by parity {parity_decreasing}"
    );

    let cfg = ScenarioConfig::from_path(&std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/chat-vs-web-updown.toml"))
        .unwrap();
    let sim = multi_session_experiment(&cfg).unwrap();
    let sim_ok = sim.windows(2).all(|w| w[1].accuracy.hi >= w[0].accuracy.lo);
    let acc: Vec<String> = sim
        .iter()
        .map(|r| format!("k={} acc={:.4} [{:.4}, {:.4}]", r.sessions, r.accuracy.accuracy, r.accuracy.lo, r.accuracy.hi))
        .collect();
    let sim_line = line(7, sim_ok, format!("simulation [{}]", acc.join(" ")));
    oracle_true && sim_line
}

fn criterion_8() -> bool {
    let cfg = ScenarioConfig {
        trials: 500,
        ..ScenarioConfig::video_vs_web()
    };
    let outputs: Vec<(String, String, String)> = [1, 2, 7]
        .into_iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let r = run_scenario(&cfg).unwrap();
                (
                    output::result_csv(&r),
                    output::report_text(&r),
                    output::dpi_csv(&dpi_check(&cfg).unwrap()),
                )
            })
        })
        .collect();
    let ok = outputs.windows(2).all(|w| w[0] == w[1]);
    line(8, ok, "result.csv, report.txt and dpi.csv identical across 1, 2 and 7 threads".into())
}

fn main() {
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("criteria failed: {failed:?}");
        std::process::exit(1);
    }
}
