//! Structural properties of the tables and the simulator over random models.

use proptest::prelude::*;
use txpolicy::report::outcome_csv;
use txpolicy::{
    compute_tables, run_campaign, ChannelModel, DpConfig, PolicySpec, PolicyTables, Recursion, SimConfig,
    ValuationModel,
};

const TOL: f64 = 1e-9;

fn valuation() -> impl Strategy<Value = ValuationModel> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|rate| ValuationModel::exponential(rate).unwrap()),
        (0.0f64..1.0, 0.2f64..3.0).prop_map(|(lo, w)| ValuationModel::uniform(lo, lo + w).unwrap()),
        (0.0f64..0.5, prop::collection::vec((0.1f64..2.0, 0.1f64..1.0), 2..=4)).prop_map(|(start, steps)| {
            let mut support = Vec::new();
            let mut at = start;
            for (step, _) in &steps {
                support.push(at);
                at += step;
            }
            let total: f64 = steps.iter().map(|(_, w)| w).sum();
            let mut probs: Vec<f64> = steps.iter().map(|(_, w)| w / total).collect();
            let head: f64 = probs[..probs.len() - 1].iter().sum();
            *probs.last_mut().unwrap() = 1.0 - head;
            ValuationModel::discrete(support, probs).unwrap()
        }),
    ]
}

fn channel() -> impl Strategy<Value = ChannelModel> {
    (0.0f64..0.6, 0.0f64..1.0, 0.1f64..3.0, 0.0f64..2.0)
        .prop_map(|(a0, frac, mu, rho)| ChannelModel::new(a0, a0 + frac * (1.0 - a0), mu, rho).unwrap())
}

fn recursion() -> impl Strategy<Value = Recursion> {
    prop_oneof![Just(Recursion::ChannelAware), Just(Recursion::ChannelAveraged)]
}

fn dp_config() -> impl Strategy<Value = DpConfig> {
    (valuation(), channel(), 0.0f64..0.8, 2usize..40, recursion()).prop_map(|(v, ch, pi, n_max, rec)| {
        DpConfig::new(v, ch, pi, n_max).unwrap().with_recursion(rec)
    })
}

fn probs(t: &PolicyTables) -> Vec<f64> {
    let ch = &t.config().channel;
    [ch.alpha0(), ch.alpha1(), t.expected_success()]
        .into_iter()
        .filter(|p| *p > 0.0)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn terminal_conditions(cfg in dp_config()) {
        let t = compute_tables(&cfg).unwrap();
        let q = t.per_slot_value();
        for n in 0..=cfg.n_max {
            prop_assert_eq!(t.ev(0, n).unwrap(), 0.0);
            for battery in n..n + 3 {
                prop_assert!((t.ev(battery, n).unwrap() - n as f64 * q).abs() <= TOL * (1.0 + n as f64));
            }
        }
    }

    #[test]
    fn ev_is_monotone_and_gaps_nonnegative(cfg in dp_config()) {
        let t = compute_tables(&cfg).unwrap();
        for n in 0..=cfg.n_max {
            for battery in 0..=n {
                let ev = t.ev(battery, n).unwrap();
                prop_assert!(t.ev(battery + 1, n).unwrap() >= ev - TOL);
                if n < cfg.n_max {
                    prop_assert!(t.ev(battery, n + 1).unwrap() >= ev - TOL);
                }
                prop_assert!(t.gap(battery, n).unwrap() >= -TOL);
            }
        }
    }

    #[test]
    fn thresholds_fall_with_battery_and_rise_with_remaining(cfg in dp_config()) {
        let t = compute_tables(&cfg).unwrap();
        for p_s in probs(&t) {
            for n in 1..=cfg.n_max {
                for battery in 1..=n {
                    let a = t.threshold_for(battery, n, p_s).unwrap();
                    prop_assert!(a >= 0.0);
                    prop_assert!(t.threshold_for(battery + 1, n, p_s).unwrap() <= a + TOL);
                    if n < cfg.n_max {
                        prop_assert!(t.threshold_for(battery, n + 1, p_s).unwrap() >= a - TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn harvest_lowers_thresholds_when_revival_is_possible(cfg in dp_config(), extra in 0.01f64..0.2) {
        let base = cfg.with_shutdown_on_empty(false);
        let t = compute_tables(&base).unwrap();
        let h = compute_tables(&DpConfig { pi: (base.pi + extra).min(1.0), ..base.clone() }).unwrap();
        for p_s in probs(&t) {
            for n in 1..=base.n_max {
                for battery in 1..=n {
                    prop_assert!(h.threshold_for(battery, n, p_s).unwrap() <= t.threshold_for(battery, n, p_s).unwrap() + TOL);
                }
            }
        }
    }

    #[test]
    fn uniform_thresholds_stay_inside_support(ch in channel(), n_max in 2usize..200) {
        // A unit is never worth more than the top valuation delivered with
        // the best success probability the recursion can count on.
        let v = ValuationModel::uniform(0.0, 2.0).unwrap();
        let aware = compute_tables(&DpConfig::new(v.clone(), ch, 0.0, n_max).unwrap()).unwrap();
        let averaged = compute_tables(
            &DpConfig::new(v, ch, 0.0, n_max).unwrap().with_recursion(Recursion::ChannelAveraged),
        )
        .unwrap();
        for n in 1..=n_max {
            for battery in 1..=n {
                prop_assert!(aware.threshold_for(battery, n, ch.alpha1()).unwrap() <= 2.0 + TOL);
                prop_assert!(averaged.threshold_for(battery, n, averaged.expected_success()).unwrap() <= 2.0 + TOL);
            }
        }
    }
}

fn sim_config() -> impl Strategy<Value = SimConfig> {
    (dp_config(), any::<u64>(), prop::collection::vec(1usize..12, 1..4), any::<bool>()).prop_map(
        |(dp, seed, levels, shutdown)| {
            let mut cfg = SimConfig::new(dp.with_shutdown_on_empty(shutdown));
            cfg.initial_battery_levels = levels;
            cfg.replications = 8;
            cfg.seed = seed;
            cfg.policies.push(PolicySpec::Static { level: f64::INFINITY });
            cfg
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_is_conserved(cfg in sim_config()) {
        for o in run_campaign(&cfg).unwrap() {
            prop_assert_eq!(o.attempts + o.final_battery, o.initial_battery + o.harvested);
            prop_assert!(o.successes <= o.attempts);
            prop_assert!(o.battery_lifetime <= cfg.horizon());
            if !o.survived {
                prop_assert_eq!(o.final_battery, 0);
            }
        }
    }

    #[test]
    fn never_transmitting_keeps_the_sensor_alive(cfg in sim_config()) {
        for o in run_campaign(&cfg).unwrap().iter().filter(|o| o.policy == "static-inf") {
            prop_assert!(o.survived);
            prop_assert_eq!(o.total_utility, 0.0);
            prop_assert_eq!(o.battery_lifetime, cfg.horizon());
        }
    }

    #[test]
    fn reruns_are_identical_for_any_thread_count(cfg in sim_config(), threads in 1usize..5) {
        let a = run_campaign(&cfg).unwrap();
        let b = run_campaign(&SimConfig { threads, ..cfg.clone() }).unwrap();
        prop_assert_eq!(outcome_csv(&a), outcome_csv(&b));
    }

    #[test]
    fn static_zero_matches_greedy(cfg in sim_config()) {
        let cfg = SimConfig { policies: vec![PolicySpec::Greedy {}, PolicySpec::Static { level: 0.0 }], ..cfg };
        let out = run_campaign(&cfg).unwrap();
        let (greedy, stat) = out.split_at(out.len() / 2);
        for (g, s) in greedy.iter().zip(stat) {
            prop_assert_eq!(
                (g.total_utility, g.battery_lifetime, g.attempts, g.successes),
                (s.total_utility, s.battery_lifetime, s.attempts, s.successes)
            );
        }
    }
}
