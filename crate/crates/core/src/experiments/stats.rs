//! Binomial confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.low <= other.high && other.low <= self.high
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> Interval {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let x = successes as f64;
    let z2 = z * z;
    let center = (x + z2 / 2.0) / (n + z2);
    let half = z / (n + z2) * (x * (n - x) / n + z2 / 4.0).sqrt();
    // clamp rounding at the ends so that low <= x/n <= high holds exactly
    let rate = x / n;
    Interval { low: (center - half).clamp(0.0, rate), high: (center + half).clamp(rate, 1.0) }
}

pub fn wilson95(successes: u64, trials: u64) -> Interval {
    wilson(successes, trials, Z95)
}

/// One-sided Clopper-Pearson upper confidence limit at level `1 - alpha`:
/// the `u` with `P(Bin(trials, u) <= events) = alpha`.
pub fn clopper_pearson_upper(events: u64, trials: u64, alpha: f64) -> f64 {
    assert!(trials > 0 && events <= trials && alpha > 0.0 && alpha < 1.0);
    if events == trials {
        return 1.0;
    }
    if events == 0 {
        return 1.0 - alpha.powf(1.0 / trials as f64);
    }
    let (a, b) = ((events + 1) as f64, (trials - events) as f64);
    // P(Bin <= x) = 1 - I_u(x+1, n-x), increasing in u through I_u
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < 1.0 - alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    hi
}
