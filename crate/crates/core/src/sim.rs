//! Slot-by-slot Monte Carlo simulation with common random numbers.
//!
//! Each replication draws one trace of `(valuation, channel state, success
//! coin, harvest coin)` per slot and replays it for every policy and every
//! starting battery level. Within a slot the order of events is: sense,
//! observe the channel, decide, pay one unit and maybe deliver, harvest,
//! then shut down if the battery is empty.

use std::sync::Arc;

use rayon::prelude::*;

use crate::channel::ChannelState;
use crate::dp::{compute_tables, DpConfig};
use crate::error::{Error, Result};
use crate::policy::{Decision, DecisionContext, PolicyKind, PolicySpec};
use crate::rng::RandomStream;

/// Random inputs of one slot. Every field is drawn whether or not the
/// policy ends up using it, so traces do not depend on the policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDraw {
    pub valuation: f64,
    pub channel: ChannelState,
    pub success_coin: f64,
    pub harvest_coin: f64,
}

pub fn draw_trace(cfg: &DpConfig, slots: usize, rng: &mut RandomStream) -> Vec<SlotDraw> {
    (0..slots)
        .map(|_| SlotDraw {
            valuation: cfg.valuation.sample(rng),
            channel: cfg.channel.sample_state(rng),
            success_coin: rng.uniform(),
            harvest_coin: rng.uniform(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensorState {
    pub battery: usize,
    pub remaining: usize,
    pub alive: bool,
}

impl SensorState {
    pub fn new(battery: usize, remaining: usize) -> Self {
        Self {
            battery,
            remaining,
            alive: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotReport {
    pub state: SensorState,
    pub utility: f64,
    pub transmitted: bool,
    pub delivered: bool,
    pub harvested: bool,
}

/// Advance one slot. `slot_index` is 0-based.
pub fn run_slot(
    cfg: &DpConfig,
    state: SensorState,
    policy: &PolicyKind,
    slot_index: usize,
    draw: &SlotDraw,
) -> Result<SlotReport> {
    if !state.alive {
        return Err(Error::InvalidState("sensor has shut down".into()));
    }
    if state.remaining == 0 {
        return Err(Error::InvalidState("no measurements remaining".into()));
    }
    let success_prob = cfg.channel.success_prob(draw.channel);
    let decision = if state.battery == 0 {
        Decision::Discard
    } else {
        policy.decide(&DecisionContext {
            slot_index,
            valuation: draw.valuation,
            success_prob,
            battery: state.battery,
            remaining: state.remaining,
        })?
    };

    let mut next = state;
    let mut utility = 0.0;
    let transmitted = decision == Decision::Transmit;
    let mut delivered = false;
    if transmitted {
        next.battery -= 1;
        if draw.success_coin < success_prob {
            delivered = true;
            utility = cfg.valuation.utility().forward(draw.valuation);
        }
    }
    let harvested = draw.harvest_coin < cfg.pi;
    if harvested {
        next.battery += 1;
    }
    next.remaining -= 1;
    if next.battery == 0 && cfg.shutdown_on_empty {
        next.alive = false;
    }
    Ok(SlotReport {
        state: next,
        utility,
        transmitted,
        delivered,
        harvested,
    })
}

/// Totals for one sensor replayed over one trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorRun {
    pub total_utility: f64,
    /// 1-based index of the last slot the sensor was alive in.
    pub battery_lifetime: usize,
    pub attempts: usize,
    pub successes: usize,
    pub harvested: usize,
    pub final_battery: usize,
    pub survived: bool,
}

pub fn run_sensor(cfg: &DpConfig, policy: &PolicyKind, initial_battery: usize, trace: &[SlotDraw]) -> Result<SensorRun> {
    let horizon = trace.len();
    let mut state = SensorState::new(initial_battery, horizon);
    let mut run = SensorRun {
        total_utility: 0.0,
        battery_lifetime: horizon,
        attempts: 0,
        successes: 0,
        harvested: 0,
        final_battery: initial_battery,
        survived: true,
    };
    if initial_battery == 0 && cfg.shutdown_on_empty {
        run.battery_lifetime = 0;
        run.survived = false;
        return Ok(run);
    }
    for (i, draw) in trace.iter().enumerate() {
        let report = run_slot(cfg, state, policy, i, draw)?;
        run.total_utility += report.utility;
        run.attempts += report.transmitted as usize;
        run.successes += report.delivered as usize;
        run.harvested += report.harvested as usize;
        state = report.state;
        if !state.alive {
            run.battery_lifetime = i + 1;
            run.survived = false;
            break;
        }
    }
    run.final_battery = state.battery;
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Model and horizon; `dp.n_max` is the number of slots per trace.
    pub dp: DpConfig,
    pub initial_battery_levels: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub policies: Vec<PolicySpec>,
    /// Worker threads; 0 lets rayon choose.
    pub threads: usize,
}

impl SimConfig {
    pub fn new(dp: DpConfig) -> Self {
        let policies = PolicySpec::defaults(&dp.valuation);
        Self {
            dp,
            initial_battery_levels: (1..=100).collect(),
            replications: 100,
            seed: 0,
            policies,
            threads: 0,
        }
    }

    pub fn horizon(&self) -> usize {
        self.dp.n_max
    }

    pub fn validate(&self) -> Result<()> {
        self.dp.validate()?;
        if self.replications == 0 {
            return Err(Error::invalid("replications", "must be ≥ 1"));
        }
        if self.initial_battery_levels.is_empty() {
            return Err(Error::invalid("initial_battery_levels", "must not be empty"));
        }
        if self.initial_battery_levels.contains(&0) {
            return Err(Error::invalid("initial_battery_levels", "every level must be ≥ 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::invalid("policies", "must not be empty"));
        }
        self.policies.iter().try_for_each(PolicySpec::validate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub policy: String,
    /// Position of the policy in the configuration; the primary sort key.
    pub policy_index: usize,
    pub initial_battery: usize,
    pub replication: usize,
    pub total_utility: f64,
    pub battery_lifetime: usize,
    pub attempts: usize,
    pub successes: usize,
    pub harvested: usize,
    pub final_battery: usize,
    pub survived: bool,
}

/// Instantiate the configured policies, computing tables once if needed.
pub fn build_policies(cfg: &SimConfig) -> Result<Vec<PolicyKind>> {
    let tables = if cfg.policies.contains(&PolicySpec::Optimal {}) {
        Some(Arc::new(compute_tables(&cfg.dp)?))
    } else {
        None
    };
    cfg.policies
        .iter()
        .map(|spec| PolicyKind::from_spec(spec, tables.as_ref()))
        .collect()
}

pub fn run_campaign(cfg: &SimConfig) -> Result<Vec<SimOutcome>> {
    cfg.validate()?;
    let policies = build_policies(cfg)?;
    run_campaign_with(cfg, &policies)
}

/// Same as [`run_campaign`] with prebuilt policies; `cfg.policies` is ignored.
pub fn run_campaign_with(cfg: &SimConfig, policies: &[PolicyKind]) -> Result<Vec<SimOutcome>> {
    let replicate = |rep: usize| -> Result<Vec<SimOutcome>> {
        let mut rng = RandomStream::for_replication(cfg.seed, rep as u64);
        let trace = draw_trace(&cfg.dp, cfg.horizon(), &mut rng);
        let mut out = Vec::with_capacity(policies.len() * cfg.initial_battery_levels.len());
        for (policy_index, policy) in policies.iter().enumerate() {
            for &n0 in &cfg.initial_battery_levels {
                let run = run_sensor(&cfg.dp, policy, n0, &trace)?;
                out.push(SimOutcome {
                    policy: policy.id(),
                    policy_index,
                    initial_battery: n0,
                    replication: rep,
                    total_utility: run.total_utility,
                    battery_lifetime: run.battery_lifetime,
                    attempts: run.attempts,
                    successes: run.successes,
                    harvested: run.harvested,
                    final_battery: run.final_battery,
                    survived: run.survived,
                });
            }
        }
        Ok(out)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    let batches: Vec<Result<Vec<SimOutcome>>> =
        pool.install(|| (0..cfg.replications).into_par_iter().map(replicate).collect());

    let mut outcomes = Vec::with_capacity(cfg.replications * policies.len() * cfg.initial_battery_levels.len());
    for batch in batches {
        outcomes.extend(batch?);
    }
    sort_outcomes(&mut outcomes);
    Ok(outcomes)
}

pub fn sort_outcomes(outcomes: &mut [SimOutcome]) {
    outcomes.sort_by_key(|o| (o.policy_index, o.initial_battery, o.replication));
}

/// Mean and 95% normal-approximation half-width per (policy, N0).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SummaryRow {
    pub policy: String,
    #[serde(rename = "N0")]
    pub initial_battery: usize,
    pub replications: usize,
    pub mean_utility: f64,
    pub ci95_utility: f64,
    pub mean_lifetime: f64,
    pub ci95_lifetime: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

fn mean_ci(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z95 * (var / n).sqrt())
}

pub fn summarize(outcomes: &[SimOutcome]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&SimOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| (o.policy_index, o.initial_battery, o.replication));
    sorted
        .chunk_by(|a, b| a.policy_index == b.policy_index && a.initial_battery == b.initial_battery)
        .map(|group| {
            let utility: Vec<f64> = group.iter().map(|o| o.total_utility).collect();
            let lifetime: Vec<f64> = group.iter().map(|o| o.battery_lifetime as f64).collect();
            let (mean_utility, ci95_utility) = mean_ci(&utility);
            let (mean_lifetime, ci95_lifetime) = mean_ci(&lifetime);
            SummaryRow {
                policy: group[0].policy.clone(),
                initial_battery: group[0].initial_battery,
                replications: group.len(),
                mean_utility,
                ci95_utility,
                mean_lifetime,
                ci95_lifetime,
            }
        })
        .collect()
}
