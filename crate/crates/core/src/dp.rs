//! Backward induction over (battery units, measurements remaining).
//!
//! `EV(N, n)` is the best expected utility still obtainable with `N` units of
//! battery and `n` measurements to go. One step of the recursion, for
//! `1 ≤ N < n`:
//!
//! ```text
//! cont_tx   = π·EV(N,   n−1) + (1−π)·EV(N−1, n−1)
//! cont_skip = π·EV(N+1, n−1) + (1−π)·EV(N,   n−1)
//! gap       = cont_skip − cont_tx
//! EV(N, n)  = E_s[ p_s·∫_{a_s}^∞ U f + P(X ≥ a_s)·cont_tx + P(X < a_s)·cont_skip ]
//! a_s       = U⁻¹(gap / p_s)
//! ```
//!
//! The outer expectation runs over the channel state `s` (good w.p.
//! `e^{-μρ}`). [`Recursion::ChannelAveraged`] instead uses a single cutoff
//! `U⁻¹(gap / E[P_s])` and the averaged success probability inside the
//! cell, which is the value of a policy that ignores the instantaneous
//! channel. Cells with `N ≥ n` transmit every slot and equal
//! `n·E[U(X)]·E[P_s]`; they are served analytically and never stored.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::valuation::ValuationModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recursion {
    /// Per-state cutoffs inside the expectation; exact for a sensor that
    /// observes the channel before deciding.
    #[default]
    ChannelAware,
    /// One cutoff per cell computed with `E[P_s]`.
    ChannelAveraged,
}

#[derive(Debug, Clone)]
pub struct DpConfig {
    pub valuation: ValuationModel,
    pub channel: ChannelModel,
    /// Per-slot probability of harvesting one battery unit.
    pub pi: f64,
    pub n_max: usize,
    /// An empty battery shuts the sensor down for good.
    pub shutdown_on_empty: bool,
    pub recursion: Recursion,
}

impl DpConfig {
    pub fn new(valuation: ValuationModel, channel: ChannelModel, pi: f64, n_max: usize) -> Result<Self> {
        let cfg = Self {
            valuation,
            channel,
            pi,
            n_max,
            shutdown_on_empty: true,
            recursion: Recursion::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_shutdown_on_empty(mut self, shutdown: bool) -> Self {
        self.shutdown_on_empty = shutdown;
        self
    }

    pub fn with_recursion(mut self, recursion: Recursion) -> Self {
        self.recursion = recursion;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pi.is_finite() && (0.0..=1.0).contains(&self.pi)) {
            return Err(Error::invalid("pi", "must lie in [0, 1]"));
        }
        if self.n_max == 0 {
            return Err(Error::invalid("n_max", "must be ≥ 1"));
        }
        Ok(())
    }
}

/// Expected-value and gap tables, triangular in `0 ≤ N ≤ n ≤ n_max`.
#[derive(Debug, Clone)]
pub struct PolicyTables {
    cfg: DpConfig,
    expected_success: f64,
    per_slot: f64,
    // Indexed [n][N].
    ev: Vec<Vec<f64>>,
    gap: Vec<Vec<f64>>,
}

impl PolicyTables {
    pub fn config(&self) -> &DpConfig {
        &self.cfg
    }

    pub fn n_max(&self) -> usize {
        self.cfg.n_max
    }

    /// `E[P_s]` of the channel the tables were built for.
    pub fn expected_success(&self) -> f64 {
        self.expected_success
    }

    /// `E[U(X)]·E[P_s]`, the expected utility of one unconditional transmission.
    pub fn per_slot_value(&self) -> f64 {
        self.per_slot
    }

    pub fn ev(&self, battery: usize, remaining: usize) -> Result<f64> {
        self.check(battery, remaining)?;
        Ok(lookup(&self.ev, self.per_slot, battery, remaining))
    }

    /// `π(EV(N+1,n−1) − EV(N,n−1)) + (1−π)(EV(N,n−1) − EV(N−1,n−1))`;
    /// zero outside `1 ≤ N < n`.
    pub fn gap(&self, battery: usize, remaining: usize) -> Result<f64> {
        self.check(battery, remaining)?;
        if battery >= remaining {
            return Ok(0.0);
        }
        Ok(self.gap[remaining][battery])
    }

    /// Valuation cutoff for a sensor with `battery` units and `remaining`
    /// measurements whose current success probability is `p_s`. Transmit iff
    /// the valuation is at least this value.
    pub fn threshold_for(&self, battery: usize, remaining: usize, p_s: f64) -> Result<f64> {
        if battery == 0 || remaining == 0 {
            return Err(self.out_of_range(battery, remaining));
        }
        self.check(battery, remaining)?;
        if !(p_s.is_finite() && (0.0..=1.0).contains(&p_s)) {
            return Err(Error::invalid("p_s", "success probability must lie in [0, 1]"));
        }
        if battery >= remaining {
            return Ok(0.0);
        }
        Ok(cutoff(&self.cfg.valuation, self.gap[remaining][battery], p_s))
    }

    fn check(&self, battery: usize, remaining: usize) -> Result<()> {
        if remaining > self.cfg.n_max {
            return Err(self.out_of_range(battery, remaining));
        }
        Ok(())
    }

    fn out_of_range(&self, battery: usize, remaining: usize) -> Error {
        Error::OutOfRange {
            battery,
            remaining,
            horizon: self.cfg.n_max,
        }
    }
}

fn lookup(ev: &[Vec<f64>], per_slot: f64, battery: usize, remaining: usize) -> f64 {
    if battery >= remaining {
        remaining as f64 * per_slot
    } else {
        ev[remaining][battery]
    }
}

/// `max(U⁻¹(gap / p_s), 0)`, with `+∞` when `p_s = 0` makes every
/// transmission worthless.
fn cutoff(valuation: &ValuationModel, gap: f64, p_s: f64) -> f64 {
    if gap <= 0.0 {
        return 0.0;
    }
    if p_s <= 0.0 {
        return f64::INFINITY;
    }
    valuation.utility().inverse(gap / p_s).max(0.0)
}

pub fn compute_tables(cfg: &DpConfig) -> Result<PolicyTables> {
    cfg.validate()?;
    let valuation = &cfg.valuation;
    let pi = cfg.pi;
    let expected_success = cfg.channel.expected_success_prob();
    let per_slot = valuation.expected_utility() * expected_success;

    let branch = |gap: f64, p_s: f64, cont_tx: f64, cont_skip: f64| -> Result<f64> {
        let a = cutoff(valuation, gap, p_s);
        if a.is_infinite() {
            return Ok(cont_skip);
        }
        let pass = valuation.prob_at_least(a);
        Ok(p_s * valuation.tail_utility(a)? + pass * cont_tx + (1.0 - pass) * cont_skip)
    };

    let mut ev: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_max + 1);
    let mut gap: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_max + 1);
    ev.push(vec![0.0]);
    gap.push(vec![0.0]);

    for n in 1..=cfg.n_max {
        let prev = |battery: usize| lookup(&ev, per_slot, battery, n - 1);
        let mut ev_col = vec![0.0; n + 1];
        let mut gap_col = vec![0.0; n + 1];

        if !cfg.shutdown_on_empty {
            // An empty sensor idles until a harvest revives it.
            ev_col[0] = pi * prev(1) + (1.0 - pi) * prev(0);
        }
        for battery in 1..n {
            let (lo, mid, hi) = (prev(battery - 1), prev(battery), prev(battery + 1));
            let g = pi * (hi - mid) + (1.0 - pi) * (mid - lo);
            let cont_tx = pi * mid + (1.0 - pi) * lo;
            let cont_skip = pi * hi + (1.0 - pi) * mid;
            let value = match cfg.recursion {
                Recursion::ChannelAware => {
                    let mut acc = 0.0;
                    for (_, weight, p_s) in cfg.channel.states() {
                        if weight > 0.0 {
                            acc += weight * branch(g, p_s, cont_tx, cont_skip)?;
                        }
                    }
                    acc
                }
                Recursion::ChannelAveraged => branch(g, expected_success, cont_tx, cont_skip)?,
            };
            ev_col[battery] = value;
            gap_col[battery] = g;
        }
        ev_col[n] = n as f64 * per_slot;

        ev.push(ev_col);
        gap.push(gap_col);
    }

    Ok(PolicyTables {
        cfg: cfg.clone(),
        expected_success,
        per_slot,
        ev,
        gap,
    })
}
