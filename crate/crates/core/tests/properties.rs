use leaklab::bounds::{
    accuracy_from_tv, bhattacharyya, build_report, chernoff_lower_bound_from_tv, BoundInputs,
};
use leaklab::estimators::{
    exact_bayes_error, exact_chernoff, exact_mi, exact_tv, prior_entropy, DiscreteChannel, TrialSet,
};
use leaklab::harness::ScenarioConfig;
use leaklab::traffic::Direction;
use leaklab::trajectory::{
    eval_statistic, metric_d, MetricConfig, StatisticDescriptor, StatisticKind, TrajectoryPoint,
    WindowedTrajectory,
};
use proptest::prelude::*;

const WINDOW: f64 = 10.0;

fn point() -> impl Strategy<Value = TrajectoryPoint> {
    (0.0..=WINDOW, 1u64..3000, any::<bool>()).prop_map(|(time, length, up)| TrajectoryPoint {
        time,
        length,
        direction: if up { Direction::Up } else { Direction::Down },
    })
}

fn trajectory() -> impl Strategy<Value = WindowedTrajectory> {
    prop::collection::vec(point(), 0..30).prop_map(|p| WindowedTrajectory::from_points(p, WINDOW))
}

fn metric() -> impl Strategy<Value = MetricConfig> {
    (0.01..5.0f64, 0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64, 1.0e3..1.0e7f64).prop_map(
        |(w_len, w_cnt, w_time, w_dir, s_cap)| MetricConfig {
            w_len,
            w_cnt,
            w_time,
            w_dir,
            s_cap,
        },
    )
}

fn channel() -> impl Strategy<Value = DiscreteChannel> {
    (2usize..6).prop_flat_map(|k| {
        (
            0.05..0.95f64,
            prop::collection::vec(0.0..1.0f64, k),
            prop::collection::vec(0.0..1.0f64, k),
        )
            .prop_map(|(p, a, b)| {
                let norm = |v: Vec<f64>| {
                    let s: f64 = v.iter().sum::<f64>() + 1e-9 * v.len() as f64;
                    v.iter().map(|x| (x + 1e-9) / s).collect::<Vec<f64>>()
                };
                DiscreteChannel::new(vec![p, 1.0 - p], vec![norm(a), norm(b)]).unwrap()
            })
    })
}

fn descriptor(idx: usize, metric: MetricConfig) -> StatisticDescriptor {
    let key = StatisticKind::KEYS[idx];
    StatisticDescriptor::from_key(key, metric, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_is_a_pseudometric(a in trajectory(), b in trajectory(), c in trajectory(), m in metric()) {
        let d = |x: &WindowedTrajectory, y: &WindowedTrajectory| metric_d(x, y, &m).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &b) >= 0.0);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-9 * (1.0 + d(&a, &b)));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9 * (1.0 + d(&a, &c)));
    }

    #[test]
    fn statistics_are_bounded_and_lipschitz(a in trajectory(), b in trajectory(), m in metric(), idx in 0usize..3) {
        let desc = descriptor(idx, m);
        let (fa, fb) = (eval_statistic(&desc, &a), eval_statistic(&desc, &b));
        prop_assert!(fa.abs() <= desc.bound && fb.abs() <= desc.bound);
        let d = metric_d(&a, &b, &m).unwrap();
        prop_assert!((fa - fb).abs() <= desc.lipschitz * d + 1e-9, "{} {} {}", fa, fb, d);
    }

    #[test]
    fn truncation_is_idempotent(a in trajectory(), w in 0.1..WINDOW) {
        let once = a.truncate(w);
        prop_assert_eq!(once.truncate(w), once.clone());
        prop_assert!(once.points.windows(2).all(|p| p[0].time <= p[1].time));
        prop_assert!(once.points.iter().all(|p| p.time <= w));
    }

    #[test]
    fn exact_oracle_inequalities(ch in channel()) {
        let tv = exact_tv(&ch, 0, 1).unwrap();
        let mi = exact_mi(&ch);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&tv));
        prop_assert!(mi >= -1e-12 && mi <= prior_entropy(&ch) + 1e-12);
        let equal = ch.with_priors(vec![0.5, 0.5]).unwrap();
        prop_assert!((1.0 - exact_bayes_error(&equal) - accuracy_from_tv(tv)).abs() < 1e-12);
        let b = bhattacharyya(ch.row(0), ch.row(1)).unwrap();
        let c = exact_chernoff(ch.row(0), ch.row(1), 1e-10).unwrap().nats();
        prop_assert!(c + 1e-9 >= b.distance);
        prop_assert!(b.distance + 1e-9 >= chernoff_lower_bound_from_tv(tv));
        prop_assert!(tv <= (1.0 - b.coefficient * b.coefficient).sqrt() + 1e-9);
    }

    #[test]
    fn text_round_trip(ch in channel()) {
        prop_assert_eq!(DiscreteChannel::from_text(&ch.to_text()).unwrap(), ch);
    }

    #[test]
    fn channel_parser_never_panics(s in "[ 0-9.eE+\\-#a-z:\\n]{0,200}") {
        let _ = DiscreteChannel::from_text(&s);
    }

    #[test]
    fn scenario_parser_never_panics(s in "[ a-z_=.\\[\\]\"0-9\\n-]{0,300}") {
        let _ = ScenarioConfig::from_toml(&s);
    }

    #[test]
    fn reports_are_monotone_in_c(dbar in 0.0..2.0f64, c1 in 0.0..1.0f64, c2 in 0.0..1.0f64, rho in 0.0..=1.0f64) {
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        let r = |c| build_report(&BoundInputs::equal_priors(dbar, c, 1.0, rho, 1.0), None).unwrap();
        let (a, b) = (r(lo), r(hi));
        prop_assert!(b.mi_lb_bits <= a.mi_lb_bits);
        prop_assert!(b.acc_lb <= a.acc_lb);
        prop_assert!(b.tv_lb <= a.tv_lb);
    }
}

/// Two independent seeds estimate the same ψ distribution: Welch z-test on
/// the per-label means at the 99.9% level.
#[test]
fn seeds_give_statistically_indistinguishable_runs() {
    let sim = |seed| {
        let cfg = ScenarioConfig {
            trials: 400,
            seed,
            ..ScenarioConfig::video_vs_web()
        };
        TrialSet::simulate(&cfg.bundle().unwrap(), cfg.trials).unwrap()
    };
    let (a, b) = (sim(101), sim(202));
    assert_ne!(a, b);
    for label in 0..2 {
        let stats = |s: &TrialSet| {
            let v = s.column(label, |r| r.psi);
            let n = v.len() as f64;
            let mean = v.iter().sum::<f64>() / n;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (mean, var / n)
        };
        let ((ma, va), (mb, vb)) = (stats(&a), stats(&b));
        let z = (ma - mb).abs() / (va + vb).sqrt().max(1e-15);
        assert!(z < 3.29, "label {label}: z = {z}");
    }
}
