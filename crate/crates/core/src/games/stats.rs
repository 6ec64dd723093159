//! Binomial summaries of repeated games.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

/// Two-sided level used for every reported interval.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// 1/2 lies inside the interval.
    #[serde(rename = "consistent-with-negligible")]
    ConsistentWithNegligible,
    #[serde(rename = "non-negligible-at-this-λ")]
    NonNegligible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConsistentWithNegligible => "consistent-with-negligible",
            Verdict::NonNegligible => "non-negligible-at-this-λ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    pub trials: usize,
    pub wins: usize,
    pub rate: f64,
    /// `|rate − 1/2|`
    pub advantage: f64,
    /// Clopper–Pearson interval on the win rate.
    pub ci: [f64; 2],
    pub verdict: Verdict,
}

impl AdvantageEstimate {
    pub fn from_counts(wins: usize, trials: usize) -> Self {
        assert!(trials > 0 && wins <= trials, "need 0 ≤ wins ≤ trials and trials > 0");
        let rate = wins as f64 / trials as f64;
        let (lo, hi) = clopper_pearson(wins, trials, CONFIDENCE);
        let verdict = if lo <= 0.5 && 0.5 <= hi {
            Verdict::ConsistentWithNegligible
        } else {
            Verdict::NonNegligible
        };
        Self {
            trials,
            wins,
            rate,
            advantage: (rate - 0.5).abs(),
            ci: [lo, hi],
            verdict,
        }
    }

    /// Interval on the advantage implied by the rate interval.
    pub fn advantage_ci(&self) -> [f64; 2] {
        let [lo, hi] = self.ci;
        if lo <= 0.5 && 0.5 <= hi {
            [0.0, (lo - 0.5).abs().max(hi - 0.5)]
        } else {
            let (a, b) = ((lo - 0.5).abs(), (hi - 0.5).abs());
            [a.min(b), a.max(b)]
        }
    }

    pub fn ci_overlaps(&self, other: &AdvantageEstimate) -> bool {
        let [a_lo, a_hi] = self.advantage_ci();
        let [b_lo, b_hi] = other.advantage_ci();
        a_lo <= b_hi && b_lo <= a_hi
    }
}

/// Exact two-sided interval for a binomial proportion.
pub fn clopper_pearson(successes: usize, trials: usize, confidence: f64) -> (f64, f64) {
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, k, n - k + 1.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, k + 1.0, n - k)
    };
    (lo, hi)
}

/// Inverse of the regularized incomplete beta function by bisection; the
/// CDF is monotone so 200 halvings reach the f64 resolution of `[0, 1]`.
fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
