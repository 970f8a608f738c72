//! Univariate restrictions of the objective: convex hinge sums, their exact
//! minimization over a box, and the relative-interior choice rule.

use crate::model::ProblemSpec;

/// One hinge term `max(c*x + d, 0)` with `c != 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hinge {
    pub c: f64,
    pub d: f64,
}

impl Hinge {
    /// The kink location `-d/c`.
    pub fn breakpoint(&self) -> f64 {
        -self.d / self.c
    }
}

/// A convex function `sum_k max(c_k*x + d_k, 0) + slope*x + offset`.
///
/// Zero-coefficient hinges are folded into `offset` at construction, so the
/// stored hinges always have a well-defined breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffine {
    hinges: Vec<Hinge>,
    pub slope: f64,
    pub offset: f64,
}

impl PiecewiseAffine {
    pub fn new(hinges: Vec<(f64, f64)>, slope: f64, offset: f64) -> Self {
        let mut kept = Vec::with_capacity(hinges.len());
        let mut offset = offset;
        for (c, d) in hinges {
            if c == 0.0 {
                offset += d.max(0.0);
            } else {
                kept.push(Hinge { c, d });
            }
        }
        PiecewiseAffine { hinges: kept, slope, offset }
    }

    pub fn hinges(&self) -> &[Hinge] {
        &self.hinges
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let mut y = self.slope * x + self.offset;
        for h in &self.hinges {
            y += (h.c * x + h.d).max(0.0);
        }
        y
    }

    /// Minimizes the function over `[lo, hi]` (`lo < hi`, infinities allowed).
    ///
    /// `zero_tol` is the slope zero test: a segment slope `s` counts as flat
    /// when `|s| <= zero_tol`. Pass `0.0` when the slope sums are exact
    /// (integer-valued data), a small tolerance such as `1e-12` otherwise.
    ///
    /// The minimizer set of a convex piecewise-affine function is a closed
    /// interval, possibly unbounded or empty of a minimum altogether; the
    /// latter is reported as [`MinimizerSet::UnboundedBelow`].
    pub fn minimize_on_box(&self, lo: f64, hi: f64, zero_tol: f64) -> MinimizerSet {
        debug_assert!(lo < hi, "box must be non-degenerate: [{lo}, {hi}]");

        // Breakpoints sorted ascending; coincident ones merged by summing
        // their slope jumps (each hinge jumps by |c| at its kink).
        let mut bps: Vec<(f64, f64)> =
            self.hinges.iter().map(|h| (h.breakpoint(), h.c.abs())).collect();
        bps.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(bps.len());
        for (bp, jump) in bps {
            match merged.last_mut() {
                Some(last) if last.0 == bp => last.1 += jump,
                _ => merged.push((bp, jump)),
            }
        }

        // Leftmost segment slope: negative-coefficient hinges are active as
        // x -> -inf, positive ones are not.
        let mut s = self.slope;
        for h in &self.hinges {
            if h.c < 0.0 {
                s += h.c;
            }
        }

        // Segment slopes are non-decreasing. Find the flat run (if any) or
        // the sign change; express the unconstrained minimizer as an
        // extended-real interval.
        let is_zero = |s: f64| s.abs() <= zero_tol;
        let mut zero_lo: Option<f64> = None; // left end of flat run
        let mut zero_hi: Option<f64> = None; // right end of flat run
        let mut flip: Option<f64> = None; // breakpoint where slope crosses 0
        let mut prev_slope = s;
        if is_zero(prev_slope) {
            zero_lo = Some(f64::NEG_INFINITY);
        }
        for &(bp, jump) in &merged {
            let next = prev_slope + jump;
            if is_zero(prev_slope) && !is_zero(next) {
                zero_hi = Some(bp);
            }
            if !is_zero(next) {
                if is_zero(prev_slope) {
                    // flat run already closed above
                } else if prev_slope < 0.0 && next > 0.0 {
                    flip = Some(bp);
                }
            } else if zero_lo.is_none() {
                zero_lo = Some(bp);
            }
            prev_slope = next;
        }
        let last_slope = prev_slope;

        let (ulo, uhi) = if let Some(zl) = zero_lo {
            (zl, zero_hi.unwrap_or(f64::INFINITY))
        } else if let Some(x) = flip {
            (x, x)
        } else if last_slope < 0.0 {
            // Strictly decreasing everywhere: minimum at the right end.
            if hi == f64::INFINITY {
                return MinimizerSet::UnboundedBelow;
            }
            return MinimizerSet::Singleton(hi);
        } else {
            // Strictly increasing everywhere: minimum at the left end.
            if lo == f64::NEG_INFINITY {
                return MinimizerSet::UnboundedBelow;
            }
            return MinimizerSet::Singleton(lo);
        };

        // Project the interval onto the box. Clamping both endpoints into
        // [lo, hi] is exactly the projection of a closed interval.
        let clamp = |x: f64| x.max(lo).min(hi);
        MinimizerSet::from_interval(clamp(ulo), clamp(uhi))
    }
}

/// The set of minimizers of a univariate restriction over its box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinimizerSet {
    Singleton(f64),
    /// Closed interval `[lo, hi]` with `lo < hi`, both finite.
    Interval { lo: f64, hi: f64 },
    /// `(-inf, hi]`.
    HalfInfiniteLeft { hi: f64 },
    /// `[lo, +inf)`.
    HalfInfiniteRight { lo: f64 },
    AllReals,
    /// The restriction has no minimum (the whole problem is unbounded).
    UnboundedBelow,
}

impl MinimizerSet {
    fn from_interval(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        match (lo == f64::NEG_INFINITY, hi == f64::INFINITY) {
            (true, true) => MinimizerSet::AllReals,
            (true, false) => MinimizerSet::HalfInfiniteLeft { hi },
            (false, true) => MinimizerSet::HalfInfiniteRight { lo },
            (false, false) => {
                if lo == hi {
                    MinimizerSet::Singleton(lo)
                } else {
                    MinimizerSet::Interval { lo, hi }
                }
            }
        }
    }

    /// A canonical point in the relative interior of the set:
    /// the value itself for singletons, the midpoint for intervals,
    /// `delta` inward from the finite end for half-lines, `0` for the whole
    /// line. `None` when the set marks an unbounded problem.
    pub fn ri_point(&self, delta: f64) -> Option<f64> {
        debug_assert!(delta > 0.0);
        match *self {
            MinimizerSet::Singleton(x) => Some(x),
            MinimizerSet::Interval { lo, hi } => Some((lo + hi) / 2.0),
            MinimizerSet::HalfInfiniteLeft { hi } => Some(hi - delta),
            MinimizerSet::HalfInfiniteRight { lo } => Some(lo + delta),
            MinimizerSet::AllReals => Some(0.0),
            MinimizerSet::UnboundedBelow => None,
        }
    }

    /// True when `x` lies in the relative interior of the set: equal (within
    /// `tol`) for singletons, strictly inside for everything else. An
    /// interval of width at most `2 * tol` is a singleton at resolution
    /// `tol` and is judged like one; rounding can shave a true tie into a
    /// sliver interval whose endpoints no point ever strictly clears.
    pub fn contains_in_relative_interior(&self, x: f64, tol: f64) -> bool {
        match *self {
            MinimizerSet::Singleton(v) => (x - v).abs() <= tol,
            MinimizerSet::Interval { lo, hi } if hi - lo <= 2.0 * tol => {
                (x - 0.5 * (lo + hi)).abs() <= tol
            }
            MinimizerSet::Interval { lo, hi } => lo < x && x < hi,
            MinimizerSet::HalfInfiniteLeft { hi } => x < hi,
            MinimizerSet::HalfInfiniteRight { lo } => x > lo,
            MinimizerSet::AllReals => true,
            MinimizerSet::UnboundedBelow => false,
        }
    }

    /// Closed-set membership (within `tol` at finite endpoints).
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        match *self {
            MinimizerSet::Singleton(v) => (x - v).abs() <= tol,
            MinimizerSet::Interval { lo, hi } => x >= lo - tol && x <= hi + tol,
            MinimizerSet::HalfInfiniteLeft { hi } => x <= hi + tol,
            MinimizerSet::HalfInfiniteRight { lo } => x >= lo - tol,
            MinimizerSet::AllReals => true,
            MinimizerSet::UnboundedBelow => false,
        }
    }
}

/// Restriction of the objective to `phi[i]`, up to an additive constant.
///
/// `activity` must hold the current column activities
/// `v[j] + A[:,j]'phi + B[:,j]'lam`. Each hinge `j` coupled to `phi[i]`
/// contributes `max(A[i,j]*x + k_ij, 0)` with `k_ij = activity[j] -
/// A[i,j]*phi[i]` (the hinge argument with `phi[i]`'s own contribution
/// removed), and the dedicated hinge contributes `max(w[i] - x, 0)`.
pub fn build_restriction_phi(
    spec: &ProblemSpec,
    phi: &[f64],
    activity: &[f64],
    i: usize,
) -> PiecewiseAffine {
    let mut hinges = Vec::with_capacity(1 + spec.mat_a.row(i).len());
    hinges.push((-1.0, spec.w[i]));
    for &(j, coeff) in spec.mat_a.row(i) {
        if coeff != 0.0 {
            hinges.push((coeff, activity[j] - coeff * phi[i]));
        }
    }
    PiecewiseAffine::new(hinges, spec.a[i], 0.0)
}

/// Restriction of the objective to `lam[i]`, up to an additive constant.
/// Same construction as [`build_restriction_phi`] without the dedicated
/// hinge.
pub fn build_restriction_lambda(
    spec: &ProblemSpec,
    lam: &[f64],
    activity: &[f64],
    i: usize,
) -> PiecewiseAffine {
    let mut hinges = Vec::with_capacity(spec.mat_b.row(i).len());
    for &(j, coeff) in spec.mat_b.row(i) {
        if coeff != 0.0 {
            hinges.push((coeff, activity[j] - coeff * lam[i]));
        }
    }
    PiecewiseAffine::new(hinges, spec.b[i], 0.0)
}
