//! Real-time transmit/discard policies for battery-limited sensors with
//! energy harvesting.
//!
//! A sensor senses one measurement per slot, sees its valuation and the
//! current channel state, and either spends a battery unit to transmit it or
//! discards it. [`dp::compute_tables`] solves for the optimal valuation
//! cutoffs by backward induction; [`sim`] replays the resulting policy and
//! a set of baselines over shared random traces; [`oracle`] checks the
//! recursion by exhaustive enumeration on small discrete instances.
//!
//! ```
//! use txpolicy::{ChannelModel, DpConfig, ValuationModel, compute_tables};
//!
//! let cfg = DpConfig::new(ValuationModel::exponential(1.0)?, ChannelModel::default(), 0.0, 100)?;
//! let tables = compute_tables(&cfg)?;
//! // One unit, two slots, good channel: (1 − π)·E[X]·E[P_s] / α1.
//! let a = tables.threshold_for(1, 2, 0.8)?;
//! assert!((a - tables.expected_success() / 0.8).abs() < 1e-12);
//! # Ok::<(), txpolicy::Error>(())
//! ```

pub mod channel;
pub mod cli;
pub mod closed_form;
pub mod config;
pub mod dp;
mod error;
pub mod oracle;
pub mod policy;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod sim;
pub mod valuation;
pub mod verify;

pub use channel::{ChannelModel, ChannelState};
pub use config::{load_config, ExperimentConfig};
pub use dp::{compute_tables, DpConfig, PolicyTables, Recursion};
pub use error::{Error, Result};
pub use oracle::{oracle_policy_value, oracle_value, OracleInstance};
pub use policy::{Decision, DecisionContext, PolicyKind, PolicySpec};
pub use rng::RandomStream;
pub use sim::{run_campaign, run_slot, summarize, SimConfig, SimOutcome, SensorState};
pub use valuation::{Distribution, UtilityMap, ValuationModel};

// The guide under book/ is compiled as doctests so its snippets stay in
// sync with the crate. One module per chapter keeps failures attributable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/valuation.md")]
    mod valuation {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/dynamic-programming.md")]
    mod dynamic_programming {}
    #[doc = include_str!("../../../book/src/policies.md")]
    mod policies {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
