//! Exact LP oracle: two-phase dense simplex over arbitrary-precision
//! rationals with Bland's anti-cycling rule.
//!
//! The piecewise-affine objective linearizes with one auxiliary variable per
//! hinge:
//!
//! ```text
//! min  sum(alpha) + sum(beta) + a'phi + b'lam
//! s.t. alpha[i] + phi[i]                     >= w[i]
//!      beta[j] - A[:,j]'phi - B[:,j]'lam     >= v[j]
//!      alpha, beta >= 0,  boxes on phi, lam
//! ```
//!
//! Every finite `f64` is an exact rational, so the input promotion is
//! lossless and the reported optimum is exact.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::model::ProblemSpec;

/// Hard cap on `m + n + p`; beyond this the dense exact tableau is too slow
/// to be useful as a test oracle.
pub const SIZE_LIMIT: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOracleError {
    /// Objective can be driven to -infinity.
    Unbounded,
    /// No feasible point (cannot happen for specs with valid boxes, but the
    /// simplex detects it all the same).
    Infeasible,
    TooLarge { size: usize, max: usize },
    InvalidSpec,
}

impl std::fmt::Display for LpOracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LpOracleError::Unbounded => write!(f, "objective is unbounded below"),
            LpOracleError::Infeasible => write!(f, "no feasible point"),
            LpOracleError::TooLarge { size, max } => {
                write!(f, "instance too large for the exact oracle: {size} > {max}")
            }
            LpOracleError::InvalidSpec => write!(f, "spec fails validation"),
        }
    }
}

impl std::error::Error for LpOracleError {}

/// Exact optimum of the linearized problem, plus one optimal point mapped
/// back to the original variables.
#[derive(Debug, Clone)]
pub struct ExactLpSolution {
    pub exact: BigRational,
    /// `exact` rounded to the nearest double.
    pub value: f64,
    pub phi: Vec<f64>,
    pub lam: Vec<f64>,
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// How an original (possibly boxed, possibly free) variable maps to
/// non-negative standard-form columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lo + col`
    ShiftLo { col: usize, lo: BigRational },
    /// `x = hi - col`
    FlipHi { col: usize, hi: BigRational },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

/// Standard-form problem under construction: `min c'x, Rx = rhs, x >= 0`.
struct StdLp {
    ncols: usize,
    cost: Vec<BigRational>,
    constant: BigRational,
}

impl StdLp {
    fn new() -> Self {
        StdLp { ncols: 0, cost: Vec::new(), constant: BigRational::zero() }
    }

    fn add_col(&mut self, cost: BigRational) -> usize {
        self.ncols += 1;
        self.cost.push(cost);
        self.ncols - 1
    }
}

/// A linear expression over standard-form columns plus a constant, used to
/// translate original-variable coefficients through their `VarMap`.
fn add_term(
    coeffs: &mut Vec<(usize, BigRational)>,
    constant: &mut BigRational,
    map: &VarMap,
    gamma: &BigRational,
) {
    if gamma.is_zero() {
        return;
    }
    match map {
        VarMap::ShiftLo { col, lo } => {
            coeffs.push((*col, gamma.clone()));
            *constant += gamma * lo;
        }
        VarMap::FlipHi { col, hi } => {
            coeffs.push((*col, -gamma.clone()));
            *constant += gamma * hi;
        }
        VarMap::Split { pos, neg } => {
            coeffs.push((*pos, gamma.clone()));
            coeffs.push((*neg, -gamma.clone()));
        }
    }
}

/// Solves the linearized spec exactly. See module docs for the LP.
pub fn lp_solve_exact(spec: &ProblemSpec) -> Result<ExactLpSolution, LpOracleError> {
    let size = spec.m + spec.n + spec.p;
    if size > SIZE_LIMIT {
        return Err(LpOracleError::TooLarge { size, max: SIZE_LIMIT });
    }
    if !spec.validate().is_valid() {
        return Err(LpOracleError::InvalidSpec);
    }

    let mut lp = StdLp::new();

    // Original variables in order: phi then lam. Boxed variables shift (or
    // flip) onto a single non-negative column; free variables split in two.
    let mut maps: Vec<VarMap> = Vec::with_capacity(spec.m + spec.n);
    let mut upper_rows: Vec<(usize, BigRational)> = Vec::new(); // col <= ub
    let bounds = spec
        .phi_lo
        .iter()
        .zip(&spec.phi_hi)
        .chain(spec.lam_lo.iter().zip(&spec.lam_hi));
    let linear_cost = spec.a.iter().chain(&spec.b);
    for ((&lo, &hi), &c) in bounds.zip(linear_cost) {
        let map = if lo.is_finite() {
            let col = lp.add_col(BigRational::zero());
            if hi.is_finite() {
                upper_rows.push((col, rat(hi) - rat(lo)));
            }
            VarMap::ShiftLo { col, lo: rat(lo) }
        } else if hi.is_finite() {
            let col = lp.add_col(BigRational::zero());
            VarMap::FlipHi { col, hi: rat(hi) }
        } else {
            let pos = lp.add_col(BigRational::zero());
            let neg = lp.add_col(BigRational::zero());
            VarMap::Split { pos, neg }
        };
        // Fold the linear cost through the substitution.
        let gamma = rat(c);
        let mut coeffs = Vec::new();
        add_term(&mut coeffs, &mut lp.constant, &map, &gamma);
        for (col, g) in coeffs {
            lp.cost[col] += g;
        }
        maps.push(map);
    }

    let alpha0 = lp.ncols;
    for _ in 0..spec.m {
        lp.add_col(BigRational::from_integer(1.into()));
    }
    let beta0 = lp.ncols;
    for _ in 0..spec.p {
        lp.add_col(BigRational::from_integer(1.into()));
    }

    // Inequality rows, written as sparse (coeffs, rhs) with LHS >= rhs.
    let mut ineqs: Vec<(Vec<(usize, BigRational)>, BigRational)> = Vec::new();
    for i in 0..spec.m {
        let mut coeffs = vec![(alpha0 + i, BigRational::from_integer(1.into()))];
        let mut shift = BigRational::zero();
        add_term(&mut coeffs, &mut shift, &maps[i], &BigRational::from_integer(1.into()));
        ineqs.push((coeffs, rat(spec.w[i]) - shift));
    }
    for j in 0..spec.p {
        let mut coeffs = vec![(beta0 + j, BigRational::from_integer(1.into()))];
        let mut shift = BigRational::zero();
        for &(i, val) in spec.mat_a.col(j) {
            add_term(&mut coeffs, &mut shift, &maps[i], &-rat(val));
        }
        for &(i, val) in spec.mat_b.col(j) {
            add_term(&mut coeffs, &mut shift, &maps[spec.m + i], &-rat(val));
        }
        ineqs.push((coeffs, rat(spec.v[j]) - shift));
    }

    // Assemble equality rows: surplus for >= rows, slack for upper bounds.
    // Then normalize rhs >= 0 and pick unit columns as the starting basis
    // where possible, artificials elsewhere.
    let mut dense_rows: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    let mut unit_col: Vec<Option<usize>> = Vec::new();
    for (coeffs, rhs) in ineqs {
        let surplus = lp.add_col(BigRational::zero());
        let mut row = vec![BigRational::zero(); lp.ncols];
        for (col, g) in coeffs {
            row[col] += g;
        }
        row[surplus] = -BigRational::from_integer(1.into());
        // Row reads LHS - s = rhs. When rhs <= 0, negating the whole row
        // leaves the surplus with coefficient +1 and a non-negative rhs, so
        // it can start basic; otherwise an artificial is needed.
        if rhs.is_positive() {
            dense_rows.push((row, rhs));
            unit_col.push(None);
        } else {
            for x in &mut row {
                *x = -x.clone();
            }
            dense_rows.push((row, -rhs));
            unit_col.push(Some(surplus));
        }
    }
    for (col, ub) in upper_rows {
        let slack = lp.add_col(BigRational::zero());
        let mut row = vec![BigRational::zero(); lp.ncols];
        row[col] = BigRational::from_integer(1.into());
        row[slack] = BigRational::from_integer(1.into());
        dense_rows.push((row, ub));
        unit_col.push(Some(slack));
    }

    // Pad all rows to the final column count.
    for (row, _) in &mut dense_rows {
        row.resize(lp.ncols, BigRational::zero());
    }

    let mut tableau = Tableau::new(lp.ncols, dense_rows, unit_col);
    tableau.solve(&lp.cost)?;

    let point = tableau.solution(lp.ncols);
    let exact = tableau.objective(&lp.cost) + &lp.constant;

    let read = |map: &VarMap| -> f64 {
        let val = match map {
            VarMap::ShiftLo { col, lo } => lo + &point[*col],
            VarMap::FlipHi { col, hi } => hi - &point[*col],
            VarMap::Split { pos, neg } => &point[*pos] - &point[*neg],
        };
        val.to_f64().expect("rational fits a double")
    };
    let phi: Vec<f64> = maps[..spec.m].iter().map(read).collect();
    let lam: Vec<f64> = maps[spec.m..].iter().map(read).collect();

    Ok(ExactLpSolution {
        value: exact.to_f64().expect("rational fits a double"),
        exact,
        phi,
        lam,
    })
}

/// Dense simplex tableau. Rows are `[coefficients..., rhs]`; `basis[i]` is
/// the basic column of row `i`.
struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    real_cols: usize,
    ncols: usize,
}

impl Tableau {
    /// Builds the tableau, adding artificial columns for rows without a
    /// designated starting unit column. `rhs` must be non-negative.
    fn new(
        real_cols: usize,
        rows_rhs: Vec<(Vec<BigRational>, BigRational)>,
        unit_col: Vec<Option<usize>>,
    ) -> Self {
        let nrows = rows_rhs.len();
        let num_artificial = unit_col.iter().filter(|c| c.is_none()).count();
        let ncols = real_cols + num_artificial;
        let mut rows = Vec::with_capacity(nrows);
        let mut basis = Vec::with_capacity(nrows);
        let mut next_artificial = real_cols;
        for ((mut row, rhs), unit) in rows_rhs.into_iter().zip(unit_col) {
            debug_assert!(!rhs.is_negative());
            row.resize(ncols, BigRational::zero());
            match unit {
                Some(col) => {
                    debug_assert!(row[col] == BigRational::from_integer(1.into()));
                    basis.push(col);
                }
                None => {
                    row[next_artificial] = BigRational::from_integer(1.into());
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            row.push(rhs);
            rows.push(row);
        }
        Tableau { rows, basis, real_cols, ncols }
    }

    /// Two-phase solve; afterwards the tableau is optimal for `cost`.
    fn solve(&mut self, cost: &[BigRational]) -> Result<(), LpOracleError> {
        if self.ncols > self.real_cols {
            let mut phase1 = vec![BigRational::zero(); self.ncols];
            for c in phase1.iter_mut().skip(self.real_cols) {
                *c = BigRational::from_integer(1.into());
            }
            let mut obj = self.reduced_costs(&phase1);
            if self.iterate(&mut obj).is_err() {
                // Phase 1 is bounded below by 0; unboundedness cannot occur.
                unreachable!("phase 1 cannot be unbounded");
            }
            if !self.objective(&phase1).is_zero() {
                return Err(LpOracleError::Infeasible);
            }
            self.evict_artificials();
        }
        let mut obj = self.reduced_costs(cost);
        self.iterate(&mut obj).map_err(|_| LpOracleError::Unbounded)
    }

    /// Reduced-cost row for `cost` over the current basis, rhs slot included.
    fn reduced_costs(&self, cost: &[BigRational]) -> Vec<BigRational> {
        let mut obj = vec![BigRational::zero(); self.ncols + 1];
        obj[..cost.len()].clone_from_slice(cost);
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (o, r) in obj.iter_mut().zip(row) {
                *o -= cb * r;
            }
        }
        obj
    }

    /// Bland-rule simplex iterations until optimal (`Ok`) or unbounded
    /// (`Err`). `obj` is maintained as the reduced-cost row.
    fn iterate(&mut self, obj: &mut [BigRational]) -> Result<(), ()> {
        loop {
            let entering = match (0..self.ncols).find(|&j| obj[j].is_negative()) {
                Some(j) => j,
                None => return Ok(()),
            };
            let mut leaving: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[entering].is_positive() {
                    let ratio = row[self.ncols].clone() / row[entering].clone();
                    let better = match &leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let (pivot_row, _) = leaving.ok_or(())?;
            self.pivot(pivot_row, entering, obj);
        }
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize, obj: &mut [BigRational]) {
        let factor = self.rows[pivot_row][pivot_col].clone();
        if factor != BigRational::from_integer(1.into()) {
            for x in &mut self.rows[pivot_row] {
                if !x.is_zero() {
                    *x /= factor.clone();
                }
            }
        }
        let pivot = std::mem::take(&mut self.rows[pivot_row]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == pivot_row {
                continue;
            }
            let f = row[pivot_col].clone();
            if f.is_zero() {
                continue;
            }
            for (x, pv) in row.iter_mut().zip(&pivot) {
                if !pv.is_zero() {
                    *x -= &f * pv;
                }
            }
        }
        let f = obj[pivot_col].clone();
        if !f.is_zero() {
            for (x, pv) in obj.iter_mut().zip(&pivot) {
                if !pv.is_zero() {
                    *x -= &f * pv;
                }
            }
        }
        self.rows[pivot_row] = pivot;
        self.basis[pivot_row] = pivot_col;
    }

    /// After phase 1: pivot basic artificials out on any real column, or
    /// drop their rows when redundant, then truncate artificial columns.
    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.real_cols {
                let col = (0..self.real_cols).find(|&j| !self.rows[i][j].is_zero());
                match col {
                    Some(j) => {
                        let mut dummy = vec![BigRational::zero(); self.ncols + 1];
                        self.pivot(i, j, &mut dummy);
                    }
                    None => {
                        self.rows.swap_remove(i);
                        self.basis.swap_remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        for row in &mut self.rows {
            let rhs = row.pop().expect("rhs");
            row.truncate(self.real_cols);
            row.push(rhs);
        }
        self.ncols = self.real_cols;
    }

    /// Objective value of the current basic solution.
    fn objective(&self, cost: &[BigRational]) -> BigRational {
        let mut z = BigRational::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if self.basis[i] < cost.len() {
                z += &cost[self.basis[i]] * &row[self.ncols];
            }
        }
        z
    }

    /// Values of the first `ncols` structural columns.
    fn solution(&self, ncols: usize) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); ncols];
        for (i, row) in self.rows.iter().enumerate() {
            if self.basis[i] < ncols {
                x[self.basis[i]] = row[self.ncols].clone();
            }
        }
        x
    }
}
