use std::sync::Arc;

use txpolicy::sim::run_campaign_with;
use txpolicy::{
    compute_tables, run_campaign, summarize, ChannelModel, DpConfig, PolicyKind, PolicySpec, SimConfig,
    ValuationModel,
};

fn mean_se(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let values: Vec<f64> = values.collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn uniform_optimal_matches_table_value() {
    let dp = DpConfig::new(ValuationModel::uniform(0.0, 2.0).unwrap(), ChannelModel::default(), 0.0, 1000).unwrap();
    let tables = Arc::new(compute_tables(&dp).unwrap());
    let mut cfg = SimConfig::new(dp);
    cfg.initial_battery_levels = vec![50];
    cfg.replications = 10_000;
    cfg.seed = 3;
    let out = run_campaign_with(&cfg, &[PolicyKind::Optimal(tables.clone())]).unwrap();
    let (mean, se) = mean_se(out.iter().map(|o| o.total_utility));
    let ev = tables.ev(50, 1000).unwrap();
    assert!((mean - ev).abs() <= 3.0 * se, "mc {mean} ± {se}, ev {ev}");
}

#[test]
fn rich_sensor_collects_every_slot() {
    let dp = DpConfig::new(ValuationModel::exponential(2.0).unwrap(), ChannelModel::default(), 0.0, 20).unwrap();
    let tables = Arc::new(compute_tables(&dp).unwrap());
    let mut cfg = SimConfig::new(dp);
    cfg.initial_battery_levels = vec![20];
    cfg.replications = 10_000;
    let out = run_campaign_with(&cfg, &[PolicyKind::Optimal(tables.clone())]).unwrap();
    assert!(out.iter().all(|o| o.attempts == 20));
    let (mean, se) = mean_se(out.iter().map(|o| o.total_utility));
    let expected = 20.0 * 0.5 * tables.expected_success();
    assert!((mean - expected).abs() <= 3.0 * se);
}

#[test]
fn optimal_beats_greedy_on_exponential() {
    let dp = DpConfig::new(ValuationModel::exponential(1.0).unwrap(), ChannelModel::default(), 0.0, 1000).unwrap();
    let mut cfg = SimConfig::new(dp);
    cfg.initial_battery_levels = vec![10];
    cfg.replications = 10_000;
    cfg.policies = vec![PolicySpec::Optimal {}, PolicySpec::Greedy {}];
    let rows = summarize(&run_campaign(&cfg).unwrap());
    assert_eq!(rows[0].policy, "optimal");
    assert!(rows[0].mean_utility > rows[1].mean_utility + rows[0].ci95_utility + rows[1].ci95_utility);
}

#[test]
fn greedy_lifetime_equals_battery_without_harvest() {
    let dp = DpConfig::new(ValuationModel::exponential(1.0).unwrap(), ChannelModel::default(), 0.0, 100).unwrap();
    let mut cfg = SimConfig::new(dp);
    cfg.initial_battery_levels = vec![1, 5, 37];
    cfg.replications = 50;
    cfg.policies = vec![PolicySpec::Greedy {}];
    for row in summarize(&run_campaign(&cfg).unwrap()) {
        assert_eq!(row.mean_lifetime, row.initial_battery as f64);
        assert_eq!(row.ci95_lifetime, 0.0);
    }
}

#[test]
fn optimal_outlives_greedy() {
    for pi in [0.0, 0.1] {
        let dp = DpConfig::new(ValuationModel::exponential(1.0).unwrap(), ChannelModel::default(), pi, 300).unwrap();
        let mut cfg = SimConfig::new(dp);
        cfg.initial_battery_levels = vec![1, 10, 40];
        cfg.replications = 200;
        cfg.policies = vec![PolicySpec::Optimal {}, PolicySpec::Greedy {}];
        let rows = summarize(&run_campaign(&cfg).unwrap());
        let (opt, greedy) = rows.split_at(3);
        for (o, g) in opt.iter().zip(greedy) {
            assert!(o.mean_lifetime >= g.mean_lifetime, "π={pi} N0={}", o.initial_battery);
        }
    }
}
