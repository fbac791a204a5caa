use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// A proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RateEstimate {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Wilson score interval for `k` successes in `n` trials. `n = 0` gives the
/// uninformative `[0, 1]` around 0.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> RateEstimate {
    if n == 0 {
        return RateEstimate {
            value: 0.0,
            lo: 0.0,
            hi: 1.0,
        };
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    RateEstimate {
        value: p,
        // the interval touches the boundary exactly when k is 0 or n
        lo: if k == 0 { 0.0 } else { (centre - half).max(0.0) },
        hi: if k >= n { 1.0 } else { (centre + half).min(1.0) },
    }
}

pub fn wilson_95(k: u64, n: u64) -> RateEstimate {
    wilson_interval(k, n, Z_95)
}
