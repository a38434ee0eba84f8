//! Printed closed forms for the first thresholds under identity utility.
//!
//! The `a12` forms are exact. The `a13` forms are evaluated exactly as
//! printed and are known to disagree with the recursion; callers compare them
//! against [`PolicyTables`](crate::dp::PolicyTables) and report the
//! deviation.

use crate::channel::ChannelModel;

/// `a_1^2` for exponential valuations with rate `Λ`:
/// `(1−π)(α0 + e^{−μρ}(α1−α0)) / (Λ·p_s)`.
pub fn exponential_a12(rate: f64, pi: f64, channel: &ChannelModel, p_s: f64) -> f64 {
    (1.0 - pi) * channel.expected_success_prob() / (rate * p_s)
}

/// Printed `a_1^3` for exponential valuations. `inner` is the previously
/// computed `a_1^2`, substituted where the printed form writes `a_2^1`.
pub fn exponential_a13(rate: f64, pi: f64, channel: &ChannelModel, p_s: f64, inner: f64) -> f64 {
    let eps = channel.expected_success_prob();
    let e1 = (-rate * inner).exp();
    let e2 = (-2.0 * rate * inner).exp();
    (3.0 * pi - pi * pi + e1 * (pi - 1.0)) * eps / (rate * p_s)
        + (1.0 - 2.0 * pi) * (1.0 + e2 * (rate * inner + 1.0)) / p_s
}

/// `a_1^2` for uniform valuations on `[lower, upper]`.
pub fn uniform_a12(lower: f64, upper: f64, pi: f64, channel: &ChannelModel, p_s: f64) -> f64 {
    (1.0 - pi) * (upper + lower) * channel.expected_success_prob() / (2.0 * p_s)
}

/// Printed `a_1^3` for uniform valuations on `[lower, upper]`.
pub fn uniform_a13(lower: f64, upper: f64, pi: f64, channel: &ChannelModel, p_s: f64) -> f64 {
    let eps = channel.expected_success_prob();
    (-4.0 * pi * pi + 5.0 * pi + 1.0) * (upper + lower) * eps / (4.0 * p_s)
        + (3.0 * upper * upper + 2.0 * upper * lower + lower * lower) * (1.0 - 2.0 * pi) * eps
            / (16.0 * (upper - lower) * p_s)
}
