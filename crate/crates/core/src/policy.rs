//! Transmit/discard rules: the optimal threshold policy and the baselines it
//! is compared against.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dp::PolicyTables;
use crate::error::{Error, Result};
use crate::valuation::ValuationModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Transmit,
    Discard,
}

/// What a policy sees when a measurement arrives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionContext {
    /// 0-based slot index within the trace.
    pub slot_index: usize,
    pub valuation: f64,
    /// Success probability of the current channel state.
    pub success_prob: f64,
    pub battery: usize,
    pub remaining: usize,
}

/// Policy as named in configuration files, before any tables exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PolicySpec {
    Optimal {},
    Greedy {},
    Periodic { period: usize },
    Static { level: f64 },
}

impl PolicySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PolicySpec::Periodic { period } if *period == 0 => {
                Err(Error::invalid("policies.period", "must be ≥ 1"))
            }
            PolicySpec::Static { level } if level.is_nan() || *level < 0.0 => {
                Err(Error::invalid("policies.level", "must be ≥ 0"))
            }
            _ => Ok(()),
        }
    }

    /// Baseline set used when a configuration names no policies: optimal,
    /// greedy, periodic every 3rd and 5th slot, and static cutoffs at the
    /// quartiles of the valuation law.
    pub fn defaults(valuation: &ValuationModel) -> Vec<PolicySpec> {
        let mut out = vec![
            PolicySpec::Optimal {},
            PolicySpec::Greedy {},
            PolicySpec::Periodic { period: 3 },
            PolicySpec::Periodic { period: 5 },
        ];
        out.extend(
            [0.25, 0.5, 0.75]
                .into_iter()
                .map(|p| PolicySpec::Static { level: valuation.quantile(p) }),
        );
        out
    }
}

#[derive(Debug, Clone)]
pub enum PolicyKind {
    Optimal(Arc<PolicyTables>),
    Greedy,
    /// Transmit on every `period`-th slot, starting at slot `period − 1`.
    Periodic(usize),
    /// Transmit when the valuation reaches `level`.
    StaticThreshold(f64),
}

impl PolicyKind {
    pub fn from_spec(spec: &PolicySpec, tables: Option<&Arc<PolicyTables>>) -> Result<Self> {
        spec.validate()?;
        Ok(match spec {
            PolicySpec::Optimal {} => PolicyKind::Optimal(
                tables
                    .cloned()
                    .ok_or_else(|| Error::invalid("policies", "optimal policy needs tables"))?,
            ),
            PolicySpec::Greedy {} => PolicyKind::Greedy,
            PolicySpec::Periodic { period } => PolicyKind::Periodic(*period),
            PolicySpec::Static { level } => PolicyKind::StaticThreshold(*level),
        })
    }

    pub fn decide(&self, ctx: &DecisionContext) -> Result<Decision> {
        let transmit = match self {
            PolicyKind::Optimal(tables) => {
                ctx.valuation >= tables.threshold_for(ctx.battery, ctx.remaining, ctx.success_prob)?
            }
            PolicyKind::Greedy => true,
            PolicyKind::Periodic(period) => ctx.slot_index % period == period - 1,
            PolicyKind::StaticThreshold(level) => ctx.valuation >= *level,
        };
        Ok(if transmit { Decision::Transmit } else { Decision::Discard })
    }

    /// Short identifier used in result files.
    pub fn id(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Optimal(_) => f.write_str("optimal"),
            PolicyKind::Greedy => f.write_str("greedy"),
            PolicyKind::Periodic(k) => write!(f, "periodic-{k}"),
            PolicyKind::StaticThreshold(level) => write!(f, "static-{}", crate::report::fmt_sig(*level)),
        }
    }
}
