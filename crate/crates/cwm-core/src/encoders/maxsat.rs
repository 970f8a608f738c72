//! Weighted partial Max-SAT as a hinge-sum program.
//!
//! Soft clauses are stacked into a sign matrix S (+1 for a positive
//! literal, -1 for a negated one) with per-clause negation counts nS; hard
//! clauses into H and nH likewise. The LP relaxation
//!
//! ```text
//! max  sum_c w[c] s[c]
//! s.t. s[c] <= S[c,:]'x + nS[c]      (soft c)
//!      H[c,:]'x + nH[c] >= 1         (hard c)
//!      x in [0,1]^p, s in [0,1]^m
//! ```
//!
//! is the dual of the spec built here: one phi in [0, inf) per soft
//! clause with w-hinge weight w[c], A = S, a = nS; one lam in (-inf, 0]
//! per hard clause with B = -H, b = 1 - nH; v = 0. By strong duality the
//! spec's optimum equals the relaxation's optimum, so the transform is the
//! identity. With all clauses of length at most two the spec stays in the
//! guarantee class.

use crate::model::{ProblemSpec, SparseMatrix};

use super::{Decoder, EncodedInstance, ObjectiveTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause { literals }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxSatFormula {
    pub num_vars: usize,
    /// (weight, clause) pairs; weights must be non-negative.
    pub soft: Vec<(f64, Clause)>,
    pub hard: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaxSatError {
    VarOutOfRange { hard: bool, clause: usize, var: usize, num_vars: usize },
    BadWeight { clause: usize, weight: f64 },
}

impl std::fmt::Display for MaxSatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaxSatError::VarOutOfRange { hard, clause, var, num_vars } => {
                let kind = if *hard { "hard" } else { "soft" };
                write!(
                    f,
                    "{kind} clause {clause} references variable {var}, but only {num_vars} exist"
                )
            }
            MaxSatError::BadWeight { clause, weight } => {
                write!(f, "soft clause {clause} has weight {weight}; must be finite and >= 0")
            }
        }
    }
}

impl std::error::Error for MaxSatError {}

/// Sign row of one clause: entry per variable in {-1, 0, 1} plus the
/// negation count. Repeated literals collapse; a variable occurring in
/// both polarities yields entry 0 while its negation still counts, which
/// keeps the always-true clause always satisfiable in the LP.
fn clause_row(clause: &Clause) -> (Vec<(usize, f64)>, f64) {
    let mut pos: Vec<usize> = Vec::new();
    let mut neg: Vec<usize> = Vec::new();
    for lit in &clause.literals {
        let side = if lit.negated { &mut neg } else { &mut pos };
        if !side.contains(&lit.var) {
            side.push(lit.var);
        }
    }
    let n_negated = neg.len() as f64;
    let mut entries = Vec::new();
    for &var in &pos {
        if !neg.contains(&var) {
            entries.push((var, 1.0));
        }
    }
    for &var in &neg {
        if !pos.contains(&var) {
            entries.push((var, -1.0));
        }
    }
    (entries, n_negated)
}

fn check_clause(
    clause: &Clause,
    hard: bool,
    index: usize,
    num_vars: usize,
) -> Result<(), MaxSatError> {
    for lit in &clause.literals {
        if lit.var >= num_vars {
            return Err(MaxSatError::VarOutOfRange {
                hard,
                clause: index,
                var: lit.var,
                num_vars,
            });
        }
    }
    Ok(())
}

fn has_unit_clause(formula: &MaxSatFormula) -> bool {
    let unit = |c: &Clause| {
        let (entries, _) = clause_row(c);
        entries.len() == 1
    };
    formula.soft.iter().any(|(_, c)| unit(c)) || formula.hard.iter().any(unit)
}

/// Encodes a weighted partial Max-SAT formula.
pub fn encode_maxsat(formula: &MaxSatFormula) -> Result<EncodedInstance, MaxSatError> {
    encode(formula, None)
}

/// Weighted Min-Ones SAT over the formula's hard clauses: minimize
/// `sum_j weights[j] * x[j]` subject to the hard clauses. Soft clauses are
/// ignored. `weights[j]` defaults to 1 when the slice is shorter than the
/// variable count.
pub fn encode_min_ones(
    formula: &MaxSatFormula,
    weights: &[f64],
) -> Result<EncodedInstance, MaxSatError> {
    encode(formula, Some(weights))
}

fn encode(
    formula: &MaxSatFormula,
    min_ones_weights: Option<&[f64]>,
) -> Result<EncodedInstance, MaxSatError> {
    let p = formula.num_vars;
    let min_ones = min_ones_weights.is_some();
    let m = if min_ones { 0 } else { formula.soft.len() };
    let n = formula.hard.len();

    for (index, (weight, clause)) in formula.soft.iter().enumerate() {
        check_clause(clause, false, index, p)?;
        if !min_ones && !(weight.is_finite() && *weight >= 0.0) {
            return Err(MaxSatError::BadWeight { clause: index, weight: *weight });
        }
    }
    for (index, clause) in formula.hard.iter().enumerate() {
        check_clause(clause, true, index, p)?;
    }

    let mut spec = ProblemSpec::with_dims(m, n, p);
    let mut a_triplets = Vec::new();
    if !min_ones {
        for (i, (weight, clause)) in formula.soft.iter().enumerate() {
            let (entries, n_negated) = clause_row(clause);
            for (var, sign) in entries {
                a_triplets.push((i, var, sign));
            }
            spec.a[i] = n_negated;
            spec.w[i] = *weight;
            spec.phi_lo[i] = 0.0;
        }
    }
    let mut b_triplets = Vec::new();
    for (i, clause) in formula.hard.iter().enumerate() {
        let (entries, n_negated) = clause_row(clause);
        for (var, sign) in entries {
            b_triplets.push((i, var, -sign));
        }
        spec.b[i] = 1.0 - n_negated;
        spec.lam_hi[i] = 0.0;
    }
    spec.mat_a = SparseMatrix::from_triplets(m, p, &a_triplets);
    spec.mat_b = SparseMatrix::from_triplets(n, p, &b_triplets);
    if let Some(weights) = min_ones_weights {
        for j in 0..p {
            let w = weights.get(j).copied().unwrap_or(1.0);
            if !(w.is_finite() && w >= 0.0) {
                return Err(MaxSatError::BadWeight { clause: j, weight: w });
            }
            spec.v[j] = -w;
        }
    }

    let sign = if min_ones { -1.0 } else { 1.0 };
    Ok(EncodedInstance {
        spec,
        decoder: Decoder::MaxSat {
            num_vars: p,
            min_ones,
            has_unit_clause: has_unit_clause(formula),
        },
        transform: ObjectiveTransform { sign, offset: 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::{build_certificate, verify, TOL_EQ_DEFAULT};
    use crate::encoders::{decode, AppSolution};
    use crate::solver::{solve, SolverConfig};

    fn clause(lits: &[(usize, bool)]) -> Clause {
        Clause::new(lits.iter().map(|&(var, negated)| Literal { var, negated }).collect())
    }

    #[test]
    fn soft_clause_signs_and_negation_count() {
        // (x0 or not x1), weight 4
        let formula = MaxSatFormula {
            num_vars: 2,
            soft: vec![(4.0, clause(&[(0, false), (1, true)]))],
            hard: vec![],
        };
        let inst = encode_maxsat(&formula).unwrap();
        assert_eq!(inst.spec.mat_a.triplets(), vec![(0, 0, 1.0), (0, 1, -1.0)]);
        assert_eq!(inst.spec.a, vec![1.0]);
        assert_eq!(inst.spec.w, vec![4.0]);
        assert_eq!(inst.spec.phi_lo, vec![0.0]);
        assert_eq!(inst.spec.phi_hi, vec![f64::INFINITY]);
        assert!(inst.spec.validate().is_valid());
        assert!(inst.spec.check_guarantee().satisfied);
    }

    #[test]
    fn hard_clause_flips_signs_into_b() {
        // hard (not x0 or not x1): H row (-1,-1), so B row (1,1), b = -1.
        let formula = MaxSatFormula {
            num_vars: 2,
            soft: vec![],
            hard: vec![clause(&[(0, true), (1, true)])],
        };
        let inst = encode_maxsat(&formula).unwrap();
        assert_eq!(inst.spec.mat_b.triplets(), vec![(0, 0, 1.0), (0, 1, 1.0)]);
        assert_eq!(inst.spec.b, vec![-1.0]);
        assert_eq!(inst.spec.lam_hi, vec![0.0]);
        assert_eq!(inst.spec.lam_lo, vec![f64::NEG_INFINITY]);
    }

    #[test]
    fn empty_formula_has_zero_optimum() {
        let formula = MaxSatFormula { num_vars: 3, soft: vec![], hard: vec![] };
        let inst = encode_maxsat(&formula).unwrap();
        assert_eq!((inst.spec.m, inst.spec.n, inst.spec.p), (0, 0, 3));
        let res = solve(&inst.spec, &SolverConfig::default(), None).unwrap();
        assert_eq!(res.objective_value, 0.0);
        assert_eq!(inst.transform.apply(res.objective_value), 0.0);
    }

    #[test]
    fn unit_soft_clause_collects_its_weight() {
        let formula = MaxSatFormula {
            num_vars: 1,
            soft: vec![(5.0, clause(&[(0, false)]))],
            hard: vec![],
        };
        let inst = encode_maxsat(&formula).unwrap();
        let res = solve(&inst.spec, &SolverConfig::default(), None).unwrap();
        assert_eq!(res.objective_value, 5.0);
        let (cert, interior) =
            build_certificate(&inst.spec, &res.phi, &res.lam, TOL_EQ_DEFAULT);
        assert!(interior.all_interior);
        assert!(verify(&inst.spec, &res.phi, &res.lam, &cert, 1e-8).verdict);
        match decode(&inst, &res, &cert).unwrap() {
            AppSolution::MaxSat { assignment, bound, degenerate_half } => {
                assert_eq!(assignment, vec![1.0]);
                assert_eq!(bound, 5.0);
                assert!(!degenerate_half);
            }
            other => panic!("wrong solution kind: {other:?}"),
        }
    }

    #[test]
    fn always_true_clause_is_always_satisfiable() {
        // (x0 or not x0) with weight 3: entry cancels to 0 but the negation
        // still counts, so the soft constraint reads s <= 0'x + 1.
        let formula = MaxSatFormula {
            num_vars: 1,
            soft: vec![(3.0, clause(&[(0, false), (0, true)]))],
            hard: vec![],
        };
        let inst = encode_maxsat(&formula).unwrap();
        assert_eq!(inst.spec.mat_a.nnz(), 0);
        assert_eq!(inst.spec.a, vec![1.0]);
        let res = solve(&inst.spec, &SolverConfig::default(), None).unwrap();
        assert_eq!(res.objective_value, 3.0);
    }

    #[test]
    fn repeated_literal_collapses() {
        let formula = MaxSatFormula {
            num_vars: 2,
            soft: vec![(1.0, clause(&[(0, false), (0, false), (1, true)]))],
            hard: vec![],
        };
        let inst = encode_maxsat(&formula).unwrap();
        assert_eq!(inst.spec.mat_a.triplets(), vec![(0, 0, 1.0), (0, 1, -1.0)]);
        assert!(inst.spec.check_guarantee().satisfied);
    }

    #[test]
    fn three_literal_clauses_leave_the_guarantee_class() {
        let formula = MaxSatFormula {
            num_vars: 3,
            soft: vec![(1.0, clause(&[(0, false), (1, false), (2, false)]))],
            hard: vec![],
        };
        let inst = encode_maxsat(&formula).unwrap();
        assert!(inst.spec.validate().is_valid());
        assert!(!inst.spec.check_guarantee().satisfied);
    }

    #[test]
    fn min_ones_counts_the_cheapest_assignment() {
        // hard (x0 or x1), unit weights: one variable must be 1.
        let formula = MaxSatFormula {
            num_vars: 2,
            soft: vec![],
            hard: vec![clause(&[(0, false), (1, false)])],
        };
        let inst = encode_min_ones(&formula, &[1.0, 1.0]).unwrap();
        assert_eq!(inst.spec.v, vec![-1.0, -1.0]);
        assert!(inst.spec.check_guarantee().satisfied);
        let res = solve(&inst.spec, &SolverConfig::default(), None).unwrap();
        assert_eq!(res.objective_value, -1.0);
        assert_eq!(inst.transform.apply(res.objective_value), 1.0);
    }

    #[test]
    fn errors_are_reported() {
        let formula = MaxSatFormula {
            num_vars: 1,
            soft: vec![(1.0, clause(&[(1, false)]))],
            hard: vec![],
        };
        assert!(matches!(
            encode_maxsat(&formula),
            Err(MaxSatError::VarOutOfRange { hard: false, clause: 0, var: 1, .. })
        ));
        let formula = MaxSatFormula {
            num_vars: 1,
            soft: vec![(-2.0, clause(&[(0, false)]))],
            hard: vec![],
        };
        assert!(matches!(encode_maxsat(&formula), Err(MaxSatError::BadWeight { .. })));
    }

    #[test]
    fn unit_clause_detection_sees_both_kinds() {
        let no_units = MaxSatFormula {
            num_vars: 2,
            soft: vec![(1.0, clause(&[(0, false), (1, false)]))],
            hard: vec![],
        };
        let inst = encode_maxsat(&no_units).unwrap();
        assert!(matches!(inst.decoder, Decoder::MaxSat { has_unit_clause: false, .. }));
        let hard_unit = MaxSatFormula {
            num_vars: 2,
            soft: vec![(1.0, clause(&[(0, false), (1, false)]))],
            hard: vec![clause(&[(1, true)])],
        };
        let inst = encode_maxsat(&hard_unit).unwrap();
        assert!(matches!(inst.decoder, Decoder::MaxSat { has_unit_clause: true, .. }));
    }
}
