use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::ratio::Ratio;
use crate::separator::SizeBound;

/// Default constant `K` of the forest-stretch bound `K·k·ln ln(t+2)`. The
/// asymptotic statement leaves its constant unspecified; this value is an
/// empirical calibration on the bundled instance families (grids, partial
/// k-trees, random trees and G(n,p) with n up to 512).
pub const DEFAULT_FOREST_K: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Exact,
    FittedConstant,
}

/// Closed-form bound shapes for count scaling fits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum CountModel {
    /// `(k²/δ)·n^(δ/k)` for separators of size `θ^δ`, `δ = num/den`.
    PowerSeparators { num: u64, den: u64 },
    /// `k·t^(1/k)·log₂ n` for separators of constant size `t`.
    ConstantSeparators { t: u64 },
    /// `k·T(n,k)` with `T(n,k) = Σ_{i=0}^{⌊log₂ n⌋} t(n/2^i)^(1/k)`.
    SeparatorSum { bound: SizeBound },
    /// `n^(1/k)`.
    RootN,
}

impl CountModel {
    pub fn eval(&self, n: usize, k: u32) -> f64 {
        let (nf, kf) = (n as f64, k as f64);
        match *self {
            CountModel::PowerSeparators { num, den } => {
                let delta = num as f64 / den as f64;
                kf * kf / delta * nf.powf(delta / kf)
            }
            CountModel::ConstantSeparators { t } => kf * (t as f64).powf(1.0 / kf) * nf.log2(),
            CountModel::SeparatorSum { bound } => kf * separator_sum(n, k, bound),
            CountModel::RootN => nf.powf(1.0 / kf),
        }
    }
}

/// `T(n,k) = Σ_{i=0}^{⌊log₂ n⌋} t(n/2^i)^(1/k)`; a flat bound counts as
/// `t(n)` at every level.
pub fn separator_sum(n: usize, k: u32, bound: SizeBound) -> f64 {
    let levels = if n <= 1 {
        0
    } else {
        usize::BITS - 1 - n.leading_zeros()
    };
    let flat = match bound {
        SizeBound::Flat => n as f64,
        _ => 0.0,
    };
    (0..=levels)
        .map(|i| {
            let theta = n as f64 / f64::powi(2.0, i as i32);
            bound.eval(theta).unwrap_or(flat).powf(1.0 / k as f64)
        })
        .sum()
}

/// What a bound constrains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "kebab-case")]
pub enum BoundKind {
    /// Every tree dominates the graph on every pair it contains.
    NonContraction,
    /// `16·α + 1` on the cover's domain.
    MetricStretch,
    /// `6·α` on the cover's domain.
    HstStretch,
    /// The measured spanning-forest stretch on the cover's domain.
    SpanningStretch,
    /// `2·α + 1` for distance oracles.
    OracleStretch,
    /// `|S|^k >= |A|^(k-1)` for every Ramsey call.
    RamseyCardinality,
    /// Levels `q <= ⌈ln t⌉ + 2k·t^(1/k) + 1` per pairwise collection.
    RecursionDepth,
    /// Total size `<= (n-t)·q + t^(1+1/k)` per non-extended pairwise
    /// collection.
    PairwiseSize,
    /// Forest stretch `<= K·k·ln ln(t+2)` per spanning pairwise collection.
    ForestStretch { k_const: f64 },
    /// Reported paths lie in the underlying edges and sum to the estimate.
    PathConsistency,
    /// Tree count against a fitted constant times the model.
    TreeCount(CountModel),
    /// Average overlap against a fitted constant times the model.
    AverageOverlap(CountModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub name: String,
    pub kind: BoundKind,
    pub comparison: Comparison,
}

impl BoundSpec {
    pub fn exact(name: &str, kind: BoundKind) -> Self {
        Self {
            name: name.into(),
            kind,
            comparison: Comparison::Exact,
        }
    }

    pub fn fitted(name: &str, kind: BoundKind) -> Self {
        Self {
            name: name.into(),
            kind,
            comparison: Comparison::FittedConstant,
        }
    }
}

pub fn metric_stretch(alpha: Ratio) -> Ratio {
    Ratio::new(16 * alpha.num + alpha.den, alpha.den)
}

pub fn hst_stretch(alpha: Ratio) -> Ratio {
    Ratio::new(6 * alpha.num, alpha.den)
}

pub fn oracle_stretch(alpha: Ratio) -> Ratio {
    Ratio::new(2 * alpha.num + alpha.den, alpha.den)
}

/// `⌈ln t⌉` for `t >= 1`, settled by comparison against `e^m` in f64 with
/// the neighbours of the float estimate checked explicitly.
pub fn ceil_ln(t: u64) -> u64 {
    if t <= 1 {
        return 0;
    }
    let guess = (t as f64).ln().ceil() as u64;
    let mut m = guess.saturating_sub(1);
    while (m as f64).exp() < t as f64 {
        m += 1;
    }
    m
}

/// `q <= ⌈ln t⌉ + 2k·t^(1/k) + 1`, decided exactly as
/// `(q - ⌈ln t⌉ - 1)^k <= t·(2k)^k`.
pub fn depth_ok(q: u64, t: u64, k: u32) -> bool {
    let base = ceil_ln(t) + 1;
    if q <= base {
        return true;
    }
    BigUint::from(q - base).pow(k) <= BigUint::from(t) * BigUint::from(2 * k as u64).pow(k)
}

/// `size <= (n-t)·q + t^(1+1/k)`, decided exactly as
/// `(size - (n-t)·q)^k <= t^(k+1)`.
pub fn pairwise_size_ok(size: u64, n: u64, t: u64, q: u64, k: u32) -> bool {
    let linear = n.saturating_sub(t) * q;
    if size <= linear {
        return true;
    }
    BigUint::from(size - linear).pow(k) <= BigUint::from(t).pow(k + 1)
}

/// `K·k·ln ln(t+2)`.
pub fn forest_stretch_limit(k_const: f64, k: u32, t: usize) -> f64 {
    k_const * k as f64 * ((t as f64 + 2.0).ln()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_ln_matches_floats_away_from_powers_of_e() {
        assert_eq!(ceil_ln(1), 0);
        assert_eq!(ceil_ln(2), 1);
        assert_eq!(ceil_ln(3), 2);
        assert_eq!(ceil_ln(7), 2);
        assert_eq!(ceil_ln(8), 3);
        assert_eq!(ceil_ln(1000), 7);
    }

    #[test]
    fn depth_bound_is_tight_at_the_boundary() {
        // t = 4, k = 2: ⌈ln 4⌉ + 2·2·2 + 1 = 2 + 8 + 1 = 11.
        assert!(depth_ok(11, 4, 2));
        assert!(!depth_ok(12, 4, 2));
        // k = 1: ⌈ln t⌉ + 2t + 1.
        assert!(depth_ok(2 + 10 + 1, 5, 1));
        assert!(!depth_ok(14, 5, 1));
    }

    #[test]
    fn size_bound_is_tight_at_the_boundary() {
        // n = 10, t = 4, q = 3, k = 2: 6·3 + 4^(3/2) = 18 + 8 = 26.
        assert!(pairwise_size_ok(26, 10, 4, 3, 2));
        assert!(!pairwise_size_ok(27, 10, 4, 3, 2));
    }

    #[test]
    fn separator_sum_of_constant_bound() {
        // ⌊log₂ 64⌋ + 1 = 7 levels of 4^(1/2) = 2.
        let s = separator_sum(64, 2, SizeBound::Constant(4));
        assert!((s - 14.0).abs() < 1e-9);
    }
}
