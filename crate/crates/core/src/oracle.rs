//! Exhaustive-expectation ground truth for small discrete instances.
//!
//! The oracle expands the decision tree slot by slot: every valuation atom,
//! both channel states, the delivery coin and the harvest coin. At each
//! information node (valuation and channel state observed) it keeps the
//! better of transmitting and discarding, comparing realised branch values
//! directly. It uses no cutoffs, gaps or closed forms, so it shares nothing
//! with the recursion in [`crate::dp`]. Subtrees are cached by
//! `(battery, remaining)` since they depend on nothing else.

use std::collections::HashMap;

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::policy::{Decision, DecisionContext, PolicyKind};
use crate::valuation::{Distribution, ValuationModel};

pub const MAX_SUPPORT: usize = 4;
pub const MAX_INITIAL_BATTERY: usize = 4;
pub const MAX_HORIZON: usize = 6;

#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub valuation: ValuationModel,
    pub channel: ChannelModel,
    pub pi: f64,
    pub initial_battery: usize,
    pub horizon: usize,
    pub shutdown_on_empty: bool,
}

struct Tree<'a> {
    atoms: Vec<(f64, f64)>,
    // (state probability, success probability)
    states: [(f64, f64); 2],
    inst: &'a OracleInstance,
}

impl<'a> Tree<'a> {
    fn new(inst: &'a OracleInstance) -> Result<Self> {
        if !(0.0..=1.0).contains(&inst.pi) {
            return Err(Error::invalid("pi", "must lie in [0, 1]"));
        }
        let Distribution::Discrete { support, probs } = inst.valuation.distribution() else {
            return Err(Error::invalid("valuation", "oracle needs a discrete valuation"));
        };
        if support.len() > MAX_SUPPORT {
            return Err(Error::TooLarge(format!("{} support points > {MAX_SUPPORT}", support.len())));
        }
        if inst.initial_battery > MAX_INITIAL_BATTERY {
            return Err(Error::TooLarge(format!(
                "initial battery {} > {MAX_INITIAL_BATTERY}",
                inst.initial_battery
            )));
        }
        if inst.horizon > MAX_HORIZON {
            return Err(Error::TooLarge(format!("horizon {} > {MAX_HORIZON}", inst.horizon)));
        }
        let u = inst.valuation.utility();
        let atoms = support.iter().zip(probs).map(|(v, p)| (u.forward(*v), *p)).collect();
        let good = (-inst.channel.mu() * inst.channel.rho_th()).exp();
        Ok(Self {
            atoms,
            states: [(good, inst.channel.alpha1()), (1.0 - good, inst.channel.alpha0())],
            inst,
        })
    }

    fn dead(&self, battery: usize) -> bool {
        battery == 0 && self.inst.shutdown_on_empty
    }

    /// Expected future utility over the harvest coin, from a post-decision
    /// battery level.
    fn after_harvest(&self, battery: usize, remaining: usize, next: &mut impl FnMut(usize, usize) -> f64) -> f64 {
        let pi = self.inst.pi;
        let mut acc = 0.0;
        for (harvest, p) in [(1usize, pi), (0usize, 1.0 - pi)] {
            if p == 0.0 {
                continue;
            }
            let b = battery + harvest;
            let future = if self.dead(b) || remaining == 0 { 0.0 } else { next(b, remaining) };
            acc += p * future;
        }
        acc
    }

    fn optimal(&self, battery: usize, remaining: usize, memo: &mut HashMap<(usize, usize), f64>) -> f64 {
        if remaining == 0 || self.dead(battery) {
            return 0.0;
        }
        if let Some(v) = memo.get(&(battery, remaining)) {
            return *v;
        }
        let mut recurse = |b: usize, r: usize| self.optimal(b, r, memo);
        let skip = self.after_harvest(battery, remaining - 1, &mut recurse);
        let spent = if battery > 0 {
            Some(self.after_harvest(battery - 1, remaining - 1, &mut recurse))
        } else {
            None
        };
        let mut value = 0.0;
        for &(utility, p_x) in &self.atoms {
            for &(p_state, p_s) in &self.states {
                let weight = p_x * p_state;
                if weight == 0.0 {
                    continue;
                }
                let transmit = spent.map(|after| {
                    // delivered and lost both lead to the same battery
                    p_s * (utility + after) + (1.0 - p_s) * after
                });
                let best = match transmit {
                    Some(t) if t > skip => t,
                    _ => skip,
                };
                value += weight * best;
            }
        }
        memo.insert((battery, remaining), value);
        value
    }

    fn fixed(
        &self,
        policy: &PolicyKind,
        slot: usize,
        battery: usize,
        memo: &mut HashMap<(usize, usize), f64>,
    ) -> Result<f64> {
        let remaining = self.inst.horizon - slot;
        if remaining == 0 || self.dead(battery) {
            return Ok(0.0);
        }
        if let Some(v) = memo.get(&(slot, battery)) {
            return Ok(*v);
        }
        let mut err = None;
        let mut recurse = |b: usize, _r: usize| match self.fixed(policy, slot + 1, b, memo) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        };
        let skip = self.after_harvest(battery, remaining - 1, &mut recurse);
        let spent = if battery > 0 {
            self.after_harvest(battery - 1, remaining - 1, &mut recurse)
        } else {
            f64::NAN
        };
        if let Some(e) = err {
            return Err(e);
        }
        let mut value = 0.0;
        let support = match self.inst.valuation.distribution() {
            Distribution::Discrete { support, .. } => support,
            _ => unreachable!("checked in Tree::new"),
        };
        for (&(utility, p_x), &x) in self.atoms.iter().zip(support) {
            for &(p_state, p_s) in &self.states {
                let weight = p_x * p_state;
                if weight == 0.0 {
                    continue;
                }
                let decision = if battery == 0 {
                    Decision::Discard
                } else {
                    policy.decide(&DecisionContext {
                        slot_index: slot,
                        valuation: x,
                        success_prob: p_s,
                        battery,
                        remaining,
                    })?
                };
                value += weight
                    * match decision {
                        Decision::Transmit => p_s * utility + spent,
                        Decision::Discard => skip,
                    };
            }
        }
        memo.insert((slot, battery), value);
        Ok(value)
    }
}

/// Best achievable expected utility over all history-dependent policies.
pub fn oracle_value(inst: &OracleInstance) -> Result<f64> {
    let tree = Tree::new(inst)?;
    Ok(tree.optimal(inst.initial_battery, inst.horizon, &mut HashMap::new()))
}

/// Exact expected utility of a fixed policy.
pub fn oracle_policy_value(inst: &OracleInstance, policy: &PolicyKind) -> Result<f64> {
    let tree = Tree::new(inst)?;
    tree.fixed(policy, 0, inst.initial_battery, &mut HashMap::new())
}
