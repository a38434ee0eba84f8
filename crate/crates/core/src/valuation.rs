//! Valuation law of sensed data and the utility the base station derives
//! from a delivered measurement.
//!
//! The dynamic program only ever needs three functionals of the law at a
//! cutoff `a`: the tail utility `∫_a^∞ U(x) f(x) dx`, the mass `P(X ≥ a)`
//! and the inverse utility. For the identity utility on exponential and
//! uniform laws these have closed forms; everything else goes through
//! adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng::RandomStream;

/// Absolute tolerance for quadrature-backed integrals.
pub const QUADRATURE_TOL: f64 = 1e-10;

const PROBE_POINTS: usize = 1000;

/// Shape of the valuation law, as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Distribution {
    Exponential { rate: f64 },
    Uniform { lower: f64, upper: f64 },
    Discrete { support: Vec<f64>, probs: Vec<f64> },
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Strictly increasing utility `U` together with its inverse.
#[derive(Clone, Default)]
pub enum UtilityMap {
    #[default]
    Identity,
    Custom {
        name: String,
        forward: ScalarFn,
        inverse: ScalarFn,
    },
}

impl UtilityMap {
    pub fn custom<F, G>(name: impl Into<String>, forward: F, inverse: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        UtilityMap::Custom {
            name: name.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        }
    }

    /// `U(x) = slope · x`.
    pub fn linear(slope: f64) -> Self {
        Self::custom(format!("linear({slope})"), move |x| slope * x, move |u| u / slope)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, UtilityMap::Identity)
    }

    pub fn forward(&self, x: f64) -> f64 {
        match self {
            UtilityMap::Identity => x,
            UtilityMap::Custom { forward, .. } => forward(x),
        }
    }

    pub fn inverse(&self, u: f64) -> f64 {
        match self {
            UtilityMap::Identity => u,
            UtilityMap::Custom { inverse, .. } => inverse(u),
        }
    }
}

impl fmt::Debug for UtilityMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityMap::Identity => f.write_str("Identity"),
            UtilityMap::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// A validated valuation law plus utility map.
///
/// Immutable after construction; clone it freely across workers.
#[derive(Debug, Clone)]
pub struct ValuationModel {
    dist: Distribution,
    utility: UtilityMap,
    expected_utility: f64,
}

impl ValuationModel {
    pub fn new(dist: Distribution) -> Result<Self> {
        Self::with_utility(dist, UtilityMap::Identity)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(Distribution::Exponential { rate })
    }

    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Self::new(Distribution::Uniform { lower, upper })
    }

    pub fn discrete(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        Self::new(Distribution::Discrete { support, probs })
    }

    pub fn with_utility(dist: Distribution, utility: UtilityMap) -> Result<Self> {
        let dist = validate(dist)?;
        let mut model = Self {
            dist,
            utility,
            expected_utility: f64::NAN,
        };
        model.probe_utility()?;
        model.expected_utility = model.tail_utility(f64::NEG_INFINITY)?;
        if model.mean().is_nan() || model.mean() <= 0.0 {
            return Err(Error::invalid("valuation", "mean must be positive"));
        }
        if !model.expected_utility.is_finite() {
            return Err(Error::invalid("utility", "E[U(X)] is not finite"));
        }
        Ok(model)
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn utility(&self) -> &UtilityMap {
        &self.utility
    }

    /// Density for continuous laws; point mass for discrete ones.
    pub fn pdf(&self, x: f64) -> f64 {
        match &self.dist {
            Distribution::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Distribution::Uniform { lower, upper } => {
                if x < *lower || x > *upper {
                    0.0
                } else {
                    1.0 / (upper - lower)
                }
            }
            Distribution::Discrete { support, probs } => support
                .iter()
                .zip(probs)
                .filter(|(v, _)| **v == x)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.dist {
            Distribution::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Distribution::Uniform { lower, upper } => ((x - lower) / (upper - lower)).clamp(0.0, 1.0),
            Distribution::Discrete { support, probs } => support
                .iter()
                .zip(probs)
                .filter(|(v, _)| **v <= x)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
        }
    }

    /// `P(X ≥ a)`, the probability that a cutoff at `a` lets the sample through.
    pub fn prob_at_least(&self, a: f64) -> f64 {
        match &self.dist {
            Distribution::Exponential { rate } => {
                if a <= 0.0 {
                    1.0
                } else {
                    (-rate * a).exp()
                }
            }
            Distribution::Uniform { lower, upper } => ((upper - a) / (upper - lower)).clamp(0.0, 1.0),
            Distribution::Discrete { support, probs } => support
                .iter()
                .zip(probs)
                .filter(|(v, _)| **v >= a)
                .map(|(_, p)| p)
                .sum::<f64>()
                .min(1.0),
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.dist {
            Distribution::Exponential { rate } => 1.0 / rate,
            Distribution::Uniform { lower, upper } => 0.5 * (lower + upper),
            Distribution::Discrete { support, probs } => {
                support.iter().zip(probs).map(|(v, p)| v * p).sum()
            }
        }
    }

    /// `E[U(X)]`.
    pub fn expected_utility(&self) -> f64 {
        self.expected_utility
    }

    /// `∫_a^∞ U(x) f(x) dx`; discrete laws include the atom at `a` itself.
    pub fn tail_utility(&self, a: f64) -> Result<f64> {
        match (&self.dist, &self.utility) {
            (Distribution::Discrete { support, probs }, u) => Ok(support
                .iter()
                .zip(probs)
                .filter(|(v, _)| **v >= a)
                .map(|(v, p)| p * u.forward(*v))
                .sum()),
            (Distribution::Exponential { rate }, UtilityMap::Identity) => {
                let a = a.max(0.0);
                Ok((-rate * a).exp() * (a + 1.0 / rate))
            }
            (Distribution::Uniform { lower, upper }, UtilityMap::Identity) => {
                let a = a.clamp(*lower, *upper);
                Ok((upper * upper - a * a) / (2.0 * (upper - lower)))
            }
            _ => self.tail_utility_quadrature(a),
        }
    }

    /// Quadrature route for `tail_utility`, available for any continuous law.
    pub fn tail_utility_quadrature(&self, a: f64) -> Result<f64> {
        match &self.dist {
            Distribution::Exponential { rate } => {
                // x = a - ln(u)/Λ maps [a, ∞) onto (0, 1] and absorbs the density.
                let a = a.max(0.0);
                let scale = (-rate * a).exp();
                if scale == 0.0 {
                    return Ok(0.0);
                }
                let inner = quadrature::integrate(
                    |u: f64| self.utility.forward(a - u.ln() / rate),
                    0.0,
                    1.0,
                    QUADRATURE_TOL / scale,
                )?;
                Ok(scale * inner)
            }
            Distribution::Uniform { lower, upper } => {
                let a = a.clamp(*lower, *upper);
                let width = upper - lower;
                quadrature::integrate(|x| self.utility.forward(x) / width, a, *upper, QUADRATURE_TOL)
            }
            Distribution::Discrete { .. } => self.tail_utility(a),
        }
    }

    /// Inverse cdf: the smallest `x` with `P(X ≤ x) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match &self.dist {
            Distribution::Exponential { rate } => -(-p).ln_1p() / rate,
            Distribution::Uniform { lower, upper } => lower + p * (upper - lower),
            Distribution::Discrete { support, probs } => {
                let mut acc = 0.0;
                for (v, q) in support.iter().zip(probs) {
                    acc += q;
                    if acc >= p {
                        return *v;
                    }
                }
                *support.last().expect("validated nonempty")
            }
        }
    }

    /// One draw by inversion.
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match &self.dist {
            Distribution::Exponential { rate } => -rng.uniform_open_low().ln() / rate,
            Distribution::Uniform { lower, upper } => lower + rng.uniform() * (upper - lower),
            Distribution::Discrete { support, probs } => {
                let u = rng.uniform();
                let mut acc = 0.0;
                for (v, q) in support.iter().zip(probs) {
                    acc += q;
                    if u < acc {
                        return *v;
                    }
                }
                // Rounding left a sliver above the last cumulative sum.
                *support
                    .iter()
                    .zip(probs)
                    .rev()
                    .find(|(_, q)| **q > 0.0)
                    .map(|(v, _)| v)
                    .expect("validated nonempty")
            }
        }
    }

    fn probe_utility(&self) -> Result<()> {
        if self.utility.is_identity() {
            return Ok(());
        }
        let floor = self.utility.forward(self.quantile(0.0));
        if floor.is_nan() || floor < 0.0 {
            return Err(Error::invalid("utility", "must be nonnegative on the support"));
        }
        let mut points: Vec<f64> = (0..PROBE_POINTS)
            .map(|k| self.quantile((k as f64 + 0.5) / PROBE_POINTS as f64))
            .collect();
        points.dedup();
        let mut prev = f64::NEG_INFINITY;
        for &x in &points {
            let u = self.utility.forward(x);
            if !u.is_finite() || u <= prev {
                return Err(Error::invalid(
                    "utility",
                    format!("not strictly increasing near x = {x}"),
                ));
            }
            let back = self.utility.inverse(u);
            if (back - x).abs() > 1e-9 * x.abs().max(1.0) {
                return Err(Error::invalid(
                    "utility",
                    format!("inverse(forward({x})) = {back}"),
                ));
            }
            prev = u;
        }
        Ok(())
    }
}

fn validate(dist: Distribution) -> Result<Distribution> {
    match dist {
        Distribution::Exponential { rate } => {
            if !(rate.is_finite() && rate > 0.0) {
                return Err(Error::invalid("valuation.rate", "must be finite and > 0"));
            }
            Ok(Distribution::Exponential { rate })
        }
        Distribution::Uniform { lower, upper } => {
            if !(lower.is_finite() && upper.is_finite()) || lower < 0.0 || upper <= lower {
                return Err(Error::invalid(
                    "valuation",
                    "uniform bounds need 0 ≤ lower < upper",
                ));
            }
            Ok(Distribution::Uniform { lower, upper })
        }
        Distribution::Discrete { support, probs } => {
            if support.is_empty() || support.len() != probs.len() {
                return Err(Error::invalid(
                    "valuation.support",
                    "support and probs must be nonempty and of equal length",
                ));
            }
            if support.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid("valuation.support", "values must be finite and ≥ 0"));
            }
            if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::invalid("valuation.probs", "probabilities must be ≥ 0"));
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(
                    "valuation.probs",
                    format!("probabilities sum to {total}, not 1"),
                ));
            }
            let mut pairs: Vec<(f64, f64)> = support.into_iter().zip(probs).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (support, probs) = pairs.into_iter().unzip();
            Ok(Distribution::Discrete { support, probs })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson on [lo, hi], used as an oracle independent of the
    /// library quadrature.
    fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut s = f(lo) + f(hi);
        for k in 1..panels {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + k as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn pdf_examples() {
        let e = ValuationModel::exponential(1.0).unwrap();
        assert_eq!(e.pdf(0.0), 1.0);
        let u = ValuationModel::uniform(0.0, 2.0).unwrap();
        assert_eq!(u.pdf(1.0), 0.5);
        assert_eq!(u.pdf(3.0), 0.0);
    }

    #[test]
    fn cdf_examples() {
        let e = ValuationModel::exponential(1.0).unwrap();
        assert_eq!(e.cdf(0.0), 0.0);
        let u = ValuationModel::uniform(0.0, 2.0).unwrap();
        assert_eq!(u.cdf(1.0), 0.5);
        let expected = simpson(|x| e.pdf(x), 0.0, 1.0, 2000);
        assert!((expected - 0.632_120_558_828_557_7).abs() < 1e-12);
        assert!((e.cdf(1.0) - expected).abs() < 1e-12);
    }

    #[test]
    fn tail_utility_examples() {
        let e = ValuationModel::exponential(1.0).unwrap();
        assert!((e.tail_utility(0.0).unwrap() - 1.0).abs() < 1e-15);
        // Oracle: ∫_1^40 x e^{-x} dx by Simpson; the remainder past 40 is below 1e-15.
        let oracle = simpson(|x| x * (-x).exp(), 1.0, 40.0, 20_000);
        assert!((oracle - 0.735_758_882_342_884_6).abs() < 1e-12);
        assert!((e.tail_utility(1.0).unwrap() - oracle).abs() < 1e-12);

        let u = ValuationModel::uniform(0.0, 2.0).unwrap();
        assert!((u.tail_utility(1.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn discrete_tail_includes_cutoff_atom() {
        let d = ValuationModel::discrete(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(d.tail_utility(2.0).unwrap(), 1.0);
        assert_eq!(d.prob_at_least(2.0), 0.5);
        assert_eq!(d.tail_utility(2.0 + 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms_match_quadrature_on_grid() {
        let models = [
            ValuationModel::exponential(1.0).unwrap(),
            ValuationModel::exponential(2.5).unwrap(),
            ValuationModel::uniform(0.0, 2.0).unwrap(),
            ValuationModel::uniform(0.5, 3.0).unwrap(),
        ];
        for m in &models {
            for k in 0..100 {
                let a = 4.0 * k as f64 / 99.0;
                let closed = m.tail_utility(a).unwrap();
                let quad = m.tail_utility_quadrature(a).unwrap();
                assert!((closed - quad).abs() < 1e-8, "{m:?} a={a}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn tail_at_zero_is_expected_utility() {
        let m = ValuationModel::with_utility(
            Distribution::Exponential { rate: 1.0 },
            UtilityMap::custom("sqrt", f64::sqrt, |u| u * u),
        )
        .unwrap();
        // E[sqrt(X)] = Γ(3/2) = √π / 2 for unit-rate exponential.
        let gamma = std::f64::consts::PI.sqrt() / 2.0;
        assert!((m.expected_utility() - gamma).abs() < 1e-9);
        assert!((m.tail_utility(0.0).unwrap() - gamma).abs() < 1e-9);
    }

    #[test]
    fn sampling_laws() {
        let mut rng = RandomStream::new(11);
        let u = ValuationModel::uniform(0.0, 2.0).unwrap();
        let n = 1_000_000;
        let mean = (0..n).map(|_| u.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01);

        let e = ValuationModel::exponential(1.0).unwrap();
        let below = (0..n).filter(|_| e.sample(&mut rng) <= 1.0).count() as f64 / n as f64;
        assert!((below - e.cdf(1.0)).abs() < 0.01);

        let d = ValuationModel::discrete(vec![2.0], vec![1.0]).unwrap();
        assert!((0..1000).all(|_| d.sample(&mut rng) == 2.0));
    }

    #[test]
    fn rejects_bad_laws() {
        assert!(ValuationModel::exponential(0.0).is_err());
        assert!(ValuationModel::uniform(2.0, 1.0).is_err());
        assert!(ValuationModel::uniform(-1.0, 1.0).is_err());
        assert!(ValuationModel::discrete(vec![1.0, 2.0], vec![0.5, 0.4]).is_err());
        assert!(ValuationModel::discrete(vec![0.0], vec![1.0]).is_err());
        assert!(ValuationModel::discrete(vec![], vec![]).is_err());
    }

    #[test]
    fn rejects_decreasing_utility() {
        let r = ValuationModel::with_utility(
            Distribution::Uniform { lower: 0.0, upper: 2.0 },
            UtilityMap::custom("neg", |x| -x, |u| -u),
        );
        assert!(r.is_err());
        let r = ValuationModel::with_utility(
            Distribution::Uniform { lower: 0.0, upper: 2.0 },
            UtilityMap::custom("bad-inverse", |x| 2.0 * x, |u| u),
        );
        assert!(r.is_err());
    }

    #[test]
    fn config_form_rejects_unknown_keys() {
        let ok: Distribution = serde_json::from_str(r#"{"kind":"uniform","lower":0.0,"upper":2.0}"#).unwrap();
        assert_eq!(ok, Distribution::Uniform { lower: 0.0, upper: 2.0 });
        let bad = serde_json::from_str::<Distribution>(r#"{"kind":"exponential","rate":1.0,"scale":2}"#);
        assert!(bad.is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn tail_is_nonincreasing(rate in 0.1f64..5.0, a in 0.0f64..5.0, da in 0.0f64..2.0) {
                let m = ValuationModel::exponential(rate).unwrap();
                prop_assert!(m.tail_utility(a + da).unwrap() <= m.tail_utility(a).unwrap() + 1e-15);
            }

            #[test]
            fn cdf_is_monotone(lo in 0.0f64..2.0, w in 0.1f64..3.0, x in -1.0f64..6.0, dx in 0.0f64..1.0) {
                let m = ValuationModel::uniform(lo, lo + w).unwrap();
                let (c0, c1) = (m.cdf(x), m.cdf(x + dx));
                prop_assert!((0.0..=1.0).contains(&c0));
                prop_assert!(c1 >= c0);
                prop_assert_eq!(m.tail_utility(lo + w).unwrap(), 0.0);
            }
        }
    }
}
