//! Problem data: the piecewise-affine objective, its box constraints, spec
//! validation, and the structural guarantee check.

use std::fmt;

/// Sparse matrix stored as both row-major and column-major adjacency.
///
/// Both views are built once from the same triplet list and kept sorted by
/// index, so lookups are deterministic regardless of the order entries were
/// supplied in. Entries whose indices fall outside the declared shape are
/// kept aside so that validation can report them instead of silently
/// dropping data.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    out_of_range: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    /// Builds the matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate positions are kept verbatim (validation flags them);
    /// out-of-range positions are kept in a side list for the same reason.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
        let mut out_of_range = Vec::new();
        for &(i, j, val) in triplets {
            if i < nrows && j < ncols {
                rows[i].push((j, val));
                cols[j].push((i, val));
            } else {
                out_of_range.push((i, j, val));
            }
        }
        for r in &mut rows {
            r.sort_by_key(|&(j, _)| j);
        }
        for c in &mut cols {
            c.sort_by_key(|&(i, _)| i);
        }
        out_of_range.sort_by_key(|&(i, j, _)| (i, j));
        SparseMatrix { nrows, ncols, rows, cols, out_of_range }
    }

    pub fn empty(nrows: usize, ncols: usize) -> Self {
        SparseMatrix::from_triplets(nrows, ncols, &[])
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Entries `(col, value)` of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Entries `(row, value)` of column `j`, sorted by row.
    pub fn col(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// All stored entries as sorted triplets (in-range only).
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, val) in r {
                t.push((i, j, val));
            }
        }
        t
    }

    fn out_of_range(&self) -> &[(usize, usize, f64)] {
        &self.out_of_range
    }

    /// Checks that the row view and the column view describe the same matrix.
    fn views_consistent(&self) -> bool {
        let mut from_cols = Vec::with_capacity(self.nnz());
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, val) in c {
                from_cols.push((i, j, val));
            }
        }
        from_cols.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        let mut from_rows = self.triplets();
        from_rows.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)).then(x.2.total_cmp(&y.2)));
        from_rows == from_cols
    }
}

/// Which of the two coupling matrices a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatSide {
    A,
    B,
}

impl fmt::Display for MatSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatSide::A => write!(f, "A"),
            MatSide::B => write!(f, "B"),
        }
    }
}

/// Which variable block an index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Phi,
    Lambda,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Phi => write!(f, "phi"),
            VarKind::Lambda => write!(f, "lambda"),
        }
    }
}

/// One problem instance:
///
/// ```text
/// minimize  sum_i max(w[i] - phi[i], 0) + a'phi + b'lam
///             + sum_j max(v[j] + A[:,j]'phi + B[:,j]'lam, 0)
/// subject to  phi_lo <= phi <= phi_hi,  lam_lo <= lam <= lam_hi
/// ```
///
/// with `A` of shape `m x p` and `B` of shape `n x p`. Bounds may be
/// infinite (`f64::INFINITY` / `f64::NEG_INFINITY`) but must be strictly
/// ordered per coordinate. The struct itself is plain data; use
/// [`ProblemSpec::validate`] to check the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    /// Linear coefficients of `phi` (length `m`).
    pub a: Vec<f64>,
    /// Linear coefficients of `lam` (length `n`).
    pub b: Vec<f64>,
    /// Hinge shifts `max(w[i] - phi[i], 0)` (length `m`).
    pub w: Vec<f64>,
    /// Column hinge shifts (length `p`).
    pub v: Vec<f64>,
    /// Coupling of `phi` into the column hinges (`m x p`).
    pub mat_a: SparseMatrix,
    /// Coupling of `lam` into the column hinges (`n x p`).
    pub mat_b: SparseMatrix,
    pub phi_lo: Vec<f64>,
    pub phi_hi: Vec<f64>,
    pub lam_lo: Vec<f64>,
    pub lam_hi: Vec<f64>,
}

/// Relative tolerance used when testing whether a point sits inside the box.
pub const BOX_TOL: f64 = 1e-9;

/// Column-hinge count above which objective evaluation switches to
/// compensated (Neumaier) summation.
const COMPENSATED_SUM_THRESHOLD: usize = 10_000;

/// A single invariant violation found by [`ProblemSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum SpecViolation {
    LengthMismatch { field: &'static str, expected: usize, got: usize },
    ShapeMismatch { mat: MatSide, expected: (usize, usize), got: (usize, usize) },
    BoundsNotOrdered { var: VarKind, index: usize, lo: f64, hi: f64 },
    NonFinite { field: &'static str, index: usize, value: f64 },
    NanBound { var: VarKind, index: usize },
    IndexOutOfRange { mat: MatSide, row: usize, col: usize },
    DuplicateEntry { mat: MatSide, row: usize, col: usize },
    NonFiniteEntry { mat: MatSide, row: usize, col: usize, value: f64 },
    ViewsInconsistent { mat: MatSide },
}

impl fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecViolation::LengthMismatch { field, expected, got } => {
                write!(f, "{field} has length {got}, expected {expected}")
            }
            SpecViolation::ShapeMismatch { mat, expected, got } => {
                write!(f, "{mat} has shape {got:?}, expected {expected:?}")
            }
            SpecViolation::BoundsNotOrdered { var, index, lo, hi } => {
                write!(f, "{var}[{index}] bounds not strictly ordered: [{lo}, {hi}]")
            }
            SpecViolation::NonFinite { field, index, value } => {
                write!(f, "{field}[{index}] is not finite: {value}")
            }
            SpecViolation::NanBound { var, index } => write!(f, "{var}[{index}] bound is NaN"),
            SpecViolation::IndexOutOfRange { mat, row, col } => {
                write!(f, "{mat}[{row},{col}] is out of range")
            }
            SpecViolation::DuplicateEntry { mat, row, col } => {
                write!(f, "{mat}[{row},{col}] appears more than once")
            }
            SpecViolation::NonFiniteEntry { mat, row, col, value } => {
                write!(f, "{mat}[{row},{col}] is not finite: {value}")
            }
            SpecViolation::ViewsInconsistent { mat } => {
                write!(f, "{mat}: row and column views disagree")
            }
        }
    }
}

/// Result of validating a [`ProblemSpec`]. Empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<SpecViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Structural conditions under which interior local minima are global, and
/// under which the dual certificate construction is exact:
///
/// 1. every stored entry of `A` and `B` lies in `{-1, 0, 1}`,
/// 2. every row of `A` and of `B` has at most two non-zero entries,
/// 3. every `a[i]` lies in `(-inf, -2] ∪ {-1, 0, 1, 2} ∪ [3, inf)`,
/// 4. every `b[i]` lies in `(-inf, -2] ∪ {-1, 0, 1} ∪ [2, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GuaranteeViolation {
    MatrixEntry { mat: MatSide, row: usize, col: usize, value: f64 },
    RowNonzeros { mat: MatSide, row: usize, count: usize },
    SlopeA { index: usize, value: f64 },
    SlopeB { index: usize, value: f64 },
}

impl fmt::Display for GuaranteeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuaranteeViolation::MatrixEntry { mat, row, col, value } => {
                write!(f, "{mat}[{row},{col}] = {value} is not in {{-1, 0, 1}}")
            }
            GuaranteeViolation::RowNonzeros { mat, row, count } => {
                write!(f, "{mat} row {row} has {count} non-zeros (max 2)")
            }
            GuaranteeViolation::SlopeA { index, value } => {
                write!(f, "a[{index}] = {value} not in (-inf,-2] u {{-1,0,1,2}} u [3,inf)")
            }
            GuaranteeViolation::SlopeB { index, value } => {
                write!(f, "b[{index}] = {value} not in (-inf,-2] u {{-1,0,1}} u [2,inf)")
            }
        }
    }
}

/// Outcome of [`ProblemSpec::check_guarantee`].
#[derive(Debug, Clone, PartialEq)]
pub struct GuaranteeReport {
    pub satisfied: bool,
    pub violations: Vec<GuaranteeViolation>,
}

/// Errors from objective evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DimensionMismatch { what, expected, got } => {
                write!(f, "{what} has length {got}, expected {expected}")
            }
        }
    }
}

impl std::error::Error for ModelError {}

/// Left-to-right accumulator; switches to Neumaier compensation for long sums.
enum Accum {
    Plain(f64),
    Compensated { sum: f64, c: f64 },
}

impl Accum {
    fn new(compensated: bool) -> Self {
        if compensated {
            Accum::Compensated { sum: 0.0, c: 0.0 }
        } else {
            Accum::Plain(0.0)
        }
    }

    fn add(&mut self, x: f64) {
        match self {
            Accum::Plain(s) => *s += x,
            Accum::Compensated { sum, c } => {
                let t = *sum + x;
                if sum.abs() >= x.abs() {
                    *c += (*sum - t) + x;
                } else {
                    *c += (x - t) + *sum;
                }
                *sum = t;
            }
        }
    }

    fn value(&self) -> f64 {
        match self {
            Accum::Plain(s) => *s,
            Accum::Compensated { sum, c } => *sum + *c,
        }
    }
}

impl ProblemSpec {
    /// A spec with the given dimensions and all-default data: zero vectors,
    /// empty matrices, unbounded boxes.
    pub fn with_dims(m: usize, n: usize, p: usize) -> Self {
        ProblemSpec {
            m,
            n,
            p,
            a: vec![0.0; m],
            b: vec![0.0; n],
            w: vec![0.0; m],
            v: vec![0.0; p],
            mat_a: SparseMatrix::empty(m, p),
            mat_b: SparseMatrix::empty(n, p),
            phi_lo: vec![f64::NEG_INFINITY; m],
            phi_hi: vec![f64::INFINITY; m],
            lam_lo: vec![f64::NEG_INFINITY; n],
            lam_hi: vec![f64::INFINITY; n],
        }
    }

    /// Reports every invariant violation. Total: malformed specs produce
    /// entries here, never panics.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let lengths: [(&'static str, usize, usize); 8] = [
            ("a", self.a.len(), self.m),
            ("b", self.b.len(), self.n),
            ("w", self.w.len(), self.m),
            ("v", self.v.len(), self.p),
            ("phi_lo", self.phi_lo.len(), self.m),
            ("phi_hi", self.phi_hi.len(), self.m),
            ("lam_lo", self.lam_lo.len(), self.n),
            ("lam_hi", self.lam_hi.len(), self.n),
        ];
        for (field, got, expected) in lengths {
            if got != expected {
                violations.push(SpecViolation::LengthMismatch { field, expected, got });
            }
        }
        if (self.mat_a.nrows(), self.mat_a.ncols()) != (self.m, self.p) {
            violations.push(SpecViolation::ShapeMismatch {
                mat: MatSide::A,
                expected: (self.m, self.p),
                got: (self.mat_a.nrows(), self.mat_a.ncols()),
            });
        }
        if (self.mat_b.nrows(), self.mat_b.ncols()) != (self.n, self.p) {
            violations.push(SpecViolation::ShapeMismatch {
                mat: MatSide::B,
                expected: (self.n, self.p),
                got: (self.mat_b.nrows(), self.mat_b.ncols()),
            });
        }

        for (field, vec) in [("a", &self.a), ("w", &self.w)] {
            for (i, &x) in vec.iter().enumerate() {
                if !x.is_finite() {
                    violations.push(SpecViolation::NonFinite { field, index: i, value: x });
                }
            }
        }
        for (field, vec) in [("b", &self.b), ("v", &self.v)] {
            for (i, &x) in vec.iter().enumerate() {
                if !x.is_finite() {
                    violations.push(SpecViolation::NonFinite { field, index: i, value: x });
                }
            }
        }

        Self::check_bounds(VarKind::Phi, &self.phi_lo, &self.phi_hi, &mut violations);
        Self::check_bounds(VarKind::Lambda, &self.lam_lo, &self.lam_hi, &mut violations);

        for (mat, side) in [(&self.mat_a, MatSide::A), (&self.mat_b, MatSide::B)] {
            for &(row, col, _) in mat.out_of_range() {
                violations.push(SpecViolation::IndexOutOfRange { mat: side, row, col });
            }
            for i in 0..mat.nrows() {
                let r = mat.row(i);
                for k in 1..r.len() {
                    if r[k].0 == r[k - 1].0 {
                        violations.push(SpecViolation::DuplicateEntry {
                            mat: side,
                            row: i,
                            col: r[k].0,
                        });
                    }
                }
                for &(col, val) in r {
                    if !val.is_finite() {
                        violations.push(SpecViolation::NonFiniteEntry {
                            mat: side,
                            row: i,
                            col,
                            value: val,
                        });
                    }
                }
            }
            if !mat.views_consistent() {
                violations.push(SpecViolation::ViewsInconsistent { mat: side });
            }
        }

        ValidationReport { violations }
    }

    fn check_bounds(var: VarKind, lo: &[f64], hi: &[f64], out: &mut Vec<SpecViolation>) {
        for i in 0..lo.len().min(hi.len()) {
            if lo[i].is_nan() || hi[i].is_nan() {
                out.push(SpecViolation::NanBound { var, index: i });
            } else if !(lo[i] < hi[i]) {
                out.push(SpecViolation::BoundsNotOrdered { var, index: i, lo: lo[i], hi: hi[i] });
            }
        }
    }

    /// Checks the structural conditions under which every interior local
    /// minimum of the objective is global (see [`GuaranteeViolation`]).
    ///
    /// Pure predicate over the stored data: storage order of sparse entries
    /// does not affect the verdict. Membership tests are exact comparisons;
    /// the condition sets are exact-valued by design (explicitly stored zero
    /// entries count as zeros, not as non-zeros).
    pub fn check_guarantee(&self) -> GuaranteeReport {
        let mut violations = Vec::new();
        for (mat, side) in [(&self.mat_a, MatSide::A), (&self.mat_b, MatSide::B)] {
            for i in 0..mat.nrows() {
                let mut nonzeros = 0usize;
                for &(col, val) in mat.row(i) {
                    if !(val == -1.0 || val == 0.0 || val == 1.0) {
                        violations.push(GuaranteeViolation::MatrixEntry {
                            mat: side,
                            row: i,
                            col,
                            value: val,
                        });
                    }
                    if val != 0.0 {
                        nonzeros += 1;
                    }
                }
                if nonzeros > 2 {
                    violations.push(GuaranteeViolation::RowNonzeros {
                        mat: side,
                        row: i,
                        count: nonzeros,
                    });
                }
            }
        }
        for (i, &ai) in self.a.iter().enumerate() {
            let ok = ai <= -2.0 || ai >= 3.0 || ai == -1.0 || ai == 0.0 || ai == 1.0 || ai == 2.0;
            if !ok {
                violations.push(GuaranteeViolation::SlopeA { index: i, value: ai });
            }
        }
        for (i, &bi) in self.b.iter().enumerate() {
            let ok = bi <= -2.0 || bi >= 2.0 || bi == -1.0 || bi == 0.0 || bi == 1.0;
            if !ok {
                violations.push(GuaranteeViolation::SlopeB { index: i, value: bi });
            }
        }
        GuaranteeReport { satisfied: violations.is_empty(), violations }
    }

    /// True when `(phi, lam)` lies inside the box up to a relative tolerance
    /// of `BOX_TOL * (1 + |bound|)` per coordinate.
    pub fn within_box(&self, phi: &[f64], lam: &[f64]) -> bool {
        if phi.len() != self.m || lam.len() != self.n {
            return false;
        }
        let inside = |x: f64, lo: f64, hi: f64| {
            let lo_ok = lo == f64::NEG_INFINITY || x >= lo - BOX_TOL * (1.0 + lo.abs());
            let hi_ok = hi == f64::INFINITY || x <= hi + BOX_TOL * (1.0 + hi.abs());
            lo_ok && hi_ok
        };
        phi.iter()
            .zip(self.phi_lo.iter().zip(&self.phi_hi))
            .all(|(&x, (&lo, &hi))| inside(x, lo, hi))
            && lam
                .iter()
                .zip(self.lam_lo.iter().zip(&self.lam_hi))
                .all(|(&x, (&lo, &hi))| inside(x, lo, hi))
    }

    /// The argument of each column hinge: `v[j] + A[:,j]'phi + B[:,j]'lam`.
    pub fn column_activities(&self, phi: &[f64], lam: &[f64]) -> Vec<f64> {
        let mut t = Vec::with_capacity(self.p);
        for j in 0..self.p {
            let mut tj = self.v[j];
            for &(i, val) in self.mat_a.col(j) {
                tj += val * phi[i];
            }
            for &(i, val) in self.mat_b.col(j) {
                tj += val * lam[i];
            }
            t.push(tj);
        }
        t
    }

    /// Evaluates the objective at `(phi, lam)`.
    ///
    /// Terms are accumulated left-to-right; with more than 10^4 column
    /// hinges, compensated summation is used. Callers are expected to pass
    /// points inside the box (checked in debug builds).
    pub fn objective(&self, phi: &[f64], lam: &[f64]) -> Result<f64, ModelError> {
        if phi.len() != self.m {
            return Err(ModelError::DimensionMismatch {
                what: "phi",
                expected: self.m,
                got: phi.len(),
            });
        }
        if lam.len() != self.n {
            return Err(ModelError::DimensionMismatch {
                what: "lam",
                expected: self.n,
                got: lam.len(),
            });
        }
        debug_assert!(self.within_box(phi, lam), "objective evaluated outside the box");

        let compensated = self.p > COMPENSATED_SUM_THRESHOLD;
        let mut acc = Accum::new(compensated);
        for i in 0..self.m {
            acc.add((self.w[i] - phi[i]).max(0.0));
        }
        for i in 0..self.m {
            acc.add(self.a[i] * phi[i]);
        }
        for i in 0..self.n {
            acc.add(self.b[i] * lam[i]);
        }
        for j in 0..self.p {
            let mut tj = self.v[j];
            for &(i, val) in self.mat_a.col(j) {
                tj += val * phi[i];
            }
            for &(i, val) in self.mat_b.col(j) {
                tj += val * lam[i];
            }
            acc.add(tj.max(0.0));
        }
        Ok(acc.value())
    }
}
