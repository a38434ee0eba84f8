//! Two-state channel: Rayleigh-faded gain thresholded into good and bad.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelState {
    Good,
    Bad,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    alpha0: f64,
    alpha1: f64,
    mu: f64,
    rho_th: f64,
}

impl ChannelModel {
    pub fn new(alpha0: f64, alpha1: f64, mu: f64, rho_th: f64) -> Result<Self> {
        let prob = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        if !prob(alpha0) {
            return Err(Error::invalid("alpha0", "must lie in [0, 1]"));
        }
        if !prob(alpha1) {
            return Err(Error::invalid("alpha1", "must lie in [0, 1]"));
        }
        if alpha0 > alpha1 {
            return Err(Error::invalid("alpha0", "must not exceed alpha1"));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::invalid("mu", "must be finite and > 0"));
        }
        if !(rho_th.is_finite() && rho_th >= 0.0) {
            return Err(Error::invalid("rho_th", "must be finite and ≥ 0"));
        }
        Ok(Self {
            alpha0,
            alpha1,
            mu,
            rho_th,
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rho_th(&self) -> f64 {
        self.rho_th
    }

    /// Gain draw, exponential with mean `1/μ`.
    pub fn sample_gain(&self, rng: &mut RandomStream) -> f64 {
        -rng.uniform_open_low().ln() / self.mu
    }

    /// A gain exactly at the threshold counts as good.
    pub fn classify(&self, gain: f64) -> ChannelState {
        if gain >= self.rho_th {
            ChannelState::Good
        } else {
            ChannelState::Bad
        }
    }

    pub fn sample_state(&self, rng: &mut RandomStream) -> ChannelState {
        self.classify(self.sample_gain(rng))
    }

    pub fn success_prob(&self, state: ChannelState) -> f64 {
        match state {
            ChannelState::Good => self.alpha1,
            ChannelState::Bad => self.alpha0,
        }
    }

    pub fn success_prob_given_gain(&self, gain: f64) -> f64 {
        self.success_prob(self.classify(gain))
    }

    /// `P(h ≥ ρ_th) = e^{-μ ρ_th}`.
    pub fn good_state_prob(&self) -> f64 {
        (-self.mu * self.rho_th).exp()
    }

    /// Channel-averaged success probability `α0 + e^{-μρ}(α1 − α0)`.
    pub fn expected_success_prob(&self) -> f64 {
        self.alpha0 + self.good_state_prob() * (self.alpha1 - self.alpha0)
    }

    /// `(state, probability, success probability)` for both states.
    pub fn states(&self) -> [(ChannelState, f64, f64); 2] {
        let g = self.good_state_prob();
        [
            (ChannelState::Good, g, self.alpha1),
            (ChannelState::Bad, 1.0 - g, self.alpha0),
        ]
    }
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            alpha0: 0.2,
            alpha1: 0.8,
            mu: 0.5,
            rho_th: 0.5,
        }
    }
}
