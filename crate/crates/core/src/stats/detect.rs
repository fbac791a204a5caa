use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use super::interval::wilson_95;
use super::{RunStats, StatsError};

/// `P(X ≥ k)` for `X ~ Bin(n, p)`.
pub fn binomial_upper_tail(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    Binomial::new(p, n)
        .expect("p within [0, 1]")
        .sf(k - 1)
}

/// `P(X ≤ k)` for `X ~ Bin(n, p)`.
pub fn binomial_lower_tail(k: u64, n: u64, p: f64) -> f64 {
    if k >= n {
        return 1.0;
    }
    Binomial::new(p, n).expect("p within [0, 1]").cdf(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Honest,
    Cheating,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheatFractionEstimate {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl CheatFractionEstimate {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionVerdict {
    pub p_value: f64,
    pub verdict: Decision,
    pub estimated_cheat_fraction: Option<CheatFractionEstimate>,
}

impl DetectionVerdict {
    fn from_p(p_value: f64, significance: f64) -> Self {
        DetectionVerdict {
            p_value,
            verdict: if p_value < significance {
                Decision::Cheating
            } else {
                Decision::Honest
            },
            estimated_cheat_fraction: None,
        }
    }

    pub fn is_cheating(&self) -> bool {
        self.verdict == Decision::Cheating
    }
}

/// Inverts the affine failure curve `f(x) = f0 + x(f1 − f0)`, carrying the
/// Wilson interval of `k/n` through the same map.
pub fn estimate_cheat_fraction(
    failures: u64,
    n: u64,
    f0: f64,
    f1: f64,
) -> Result<CheatFractionEstimate, StatsError> {
    if !(f1 > f0) {
        return Err(StatsError::DegenerateCurve { f0, f1 });
    }
    if n == 0 {
        return Err(StatsError::EmptySample);
    }
    let rate = wilson_95(failures, n);
    let invert = |f: f64| ((f - f0) / (f1 - f0)).clamp(0.0, 1.0);
    Ok(CheatFractionEstimate {
        value: invert(rate.value),
        lo: invert(rate.lo),
        hi: invert(rate.hi),
    })
}

/// One-sided exact binomial test of the failure count against the honest
/// baseline `f0`.
pub fn honesty_test(stats: &RunStats, baseline: f64, significance: f64) -> DetectionVerdict {
    let p = binomial_upper_tail(stats.n_failures, stats.n_throws, baseline);
    DetectionVerdict::from_p(p, significance)
}

/// [`honesty_test`] plus an estimate of the cheated fraction against a
/// reference cheating failure rate `f1`.
pub fn honesty_test_with_reference(
    stats: &RunStats,
    baseline: f64,
    cheat_rate: f64,
    significance: f64,
) -> Result<DetectionVerdict, StatsError> {
    let mut verdict = honesty_test(stats, baseline, significance);
    if stats.n_throws > 0 {
        verdict.estimated_cheat_fraction = Some(estimate_cheat_fraction(
            stats.n_failures,
            stats.n_throws,
            baseline,
            cheat_rate,
        )?);
    } else if !(cheat_rate > baseline) {
        return Err(StatsError::DegenerateCurve {
            f0: baseline,
            f1: cheat_rate,
        });
    }
    Ok(verdict)
}

/// One-sided test for excess lost photons.
///
/// Runs stop after a fixed number of kept throws, so with per-attempt loss
/// probability `q` the loss count `L` before the `n`-th kept throw satisfies
/// `P(L ≥ l) = P(Bin(n + l − 1, 1 − q) ≤ n − 1)`.
pub fn loss_monitor(stats: &RunStats, baseline_loss: f64, significance: f64) -> DetectionVerdict {
    let (n, l) = (stats.n_throws, stats.n_lost);
    let p = if n == 0 || l == 0 {
        1.0
    } else {
        binomial_lower_tail(n - 1, n + l - 1, 1.0 - baseline_loss)
    };
    DetectionVerdict::from_p(p, significance)
}
