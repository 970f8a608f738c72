//! Brute-force univariate minimization by evaluation.
//!
//! Deliberately independent of `PiecewiseAffine::minimize_on_box`: instead of
//! tracking which hinges are active, this samples the function at every
//! breakpoint, box endpoint, and segment midpoint, recovers each segment's
//! slope from finite differences (exact for affine pieces with
//! dyadic-rational data), and reads the minimizer interval off the slope
//! signs.

use crate::univariate::{MinimizerSet, PiecewiseAffine};

/// Minimum value and minimizer set found by evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// `None` when the function has no minimum on the box.
    pub min_value: Option<f64>,
    pub set: MinimizerSet,
}

/// Minimizes `f` over `[lo, hi]` by evaluation. Exact when breakpoints,
/// box endpoints, and coefficients are dyadic rationals in range.
pub fn brute_force_univariate(f: &PiecewiseAffine, lo: f64, hi: f64) -> BruteForceResult {
    assert!(lo < hi, "box must be non-degenerate");

    let all_bps: Vec<f64> = f.hinges().iter().map(|h| h.breakpoint()).collect();

    // Anchors: in-box breakpoints and finite box endpoints, plus one
    // representative point per infinite tail placed beyond every breakpoint.
    let mut anchors: Vec<f64> = all_bps.iter().copied().filter(|&b| b >= lo && b <= hi).collect();
    if lo.is_finite() {
        anchors.push(lo);
    }
    if hi.is_finite() {
        anchors.push(hi);
    }
    let span_min = all_bps.iter().copied().chain(anchors.iter().copied()).fold(0.0, f64::min);
    let span_max = all_bps.iter().copied().chain(anchors.iter().copied()).fold(0.0, f64::max);
    if lo == f64::NEG_INFINITY {
        anchors.push(span_min - 1.0);
    }
    if hi == f64::INFINITY {
        anchors.push(span_max + 1.0);
    }
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    assert!(anchors.len() >= 2);

    // Segment slopes via midpoint evaluation: between adjacent anchors the
    // function is affine, so (f(b) - f(m)) / (b - m) is the exact slope.
    let k = anchors.len() - 1;
    let mut slopes = Vec::with_capacity(k);
    for t in 0..k {
        let (a, b) = (anchors[t], anchors[t + 1]);
        let m = (a + b) / 2.0;
        slopes.push((f.evaluate(b) - f.evaluate(m)) / (b - m));
    }

    // Infinite tails keep the slope of their representative segment.
    if lo == f64::NEG_INFINITY && slopes[0] > 0.0 {
        return BruteForceResult { min_value: None, set: MinimizerSet::UnboundedBelow };
    }
    if hi == f64::INFINITY && slopes[k - 1] < 0.0 {
        return BruteForceResult { min_value: None, set: MinimizerSet::UnboundedBelow };
    }

    let values: Vec<f64> = anchors.iter().map(|&x| f.evaluate(x)).collect();
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let first = values.iter().position(|&v| v == min_value).unwrap();
    let last = values.iter().rposition(|&v| v == min_value).unwrap();

    let mut set_lo = anchors[first];
    let mut set_hi = anchors[last];
    // A flat tail extends the minimizer past the representative point.
    if lo == f64::NEG_INFINITY && first == 0 && slopes[0] == 0.0 {
        set_lo = f64::NEG_INFINITY;
    }
    if hi == f64::INFINITY && last == k && slopes[k - 1] == 0.0 {
        set_hi = f64::INFINITY;
    }

    let set = match (set_lo == f64::NEG_INFINITY, set_hi == f64::INFINITY) {
        (true, true) => MinimizerSet::AllReals,
        (true, false) => MinimizerSet::HalfInfiniteLeft { hi: set_hi },
        (false, true) => MinimizerSet::HalfInfiniteRight { lo: set_lo },
        (false, false) => {
            if set_lo == set_hi {
                MinimizerSet::Singleton(set_lo)
            } else {
                MinimizerSet::Interval { lo: set_lo, hi: set_hi }
            }
        }
    };
    BruteForceResult { min_value: Some(min_value), set }
}
