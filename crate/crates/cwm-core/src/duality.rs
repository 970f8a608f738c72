//! Dual certificates for the hinge-sum LP.
//!
//! The primal in linearized form (alpha and beta are the hinge values):
//!
//! ```text
//! min  sum(alpha) + sum(beta) + a'phi + b'lam
//! s.t. beta[j] - A[:,j]'phi - B[:,j]'lam >= v[j]   (dual x[j] in [0,1])
//!      alpha[i] + phi[i] >= w[i]                   (dual s[i] in [0,1])
//!      phi_lo <= phi <= phi_hi                     (duals y >= 0, z <= 0)
//!      lam_lo <= lam <= lam_hi                     (duals q >= 0, r <= 0)
//! ```
//!
//! with dual equalities `s[i] + z[i] + y[i] - A[i,:]'x = a[i]` and
//! `r[i] + q[i] - B[i,:]'x = b[i]`, and dual objective
//! `phi_hi'z + phi_lo'y + w's + lam_hi'r + lam_lo'q + v'x`.
//!
//! [`build_certificate`] reads the dual values off an interior local
//! minimum: x is set by the sign of each column activity, s by comparing
//! w[i] to phi[i], and the bound duals by projecting the equality-row
//! residual whenever the coordinate sits on a finite bound. At an interior
//! local minimum of a guarantee-class spec, this is dual feasible and
//! complementary, so a zero gap certifies global optimality.

use crate::model::ProblemSpec;
use crate::solver::{is_interior_local_min, InteriorReport};

/// Default band half-width for the equality tests (w[i] = phi[i], bound
/// hits, zero activity). Deliberately looser than the solver's sweep
/// threshold so classifications absorb convergence drift.
pub const TOL_EQ_DEFAULT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    /// Per column hinge, in [0, 1].
    pub x: Vec<f64>,
    /// Per w-hinge, in [0, 1].
    pub s: Vec<f64>,
    /// Dual of `phi >= phi_lo`, non-negative.
    pub y: Vec<f64>,
    /// Dual of `phi <= phi_hi`, non-positive.
    pub z: Vec<f64>,
    /// Dual of `lam >= lam_lo`, non-negative.
    pub q: Vec<f64>,
    /// Dual of `lam <= lam_hi`, non-positive.
    pub r: Vec<f64>,
    /// Primal hinge values `max(w[i] - phi[i], 0)`.
    pub alpha: Vec<f64>,
    /// Primal hinge values `max(activity[j], 0)`.
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum DualityError {
    /// A dual variable paired with an infinite bound must be zero; its
    /// objective contribution is otherwise undefined.
    InfiniteBoundActive { what: &'static str, index: usize, value: f64 },
}

impl std::fmt::Display for DualityError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DualityError::InfiniteBoundActive { what, index, value } => write!(
                f,
                "{what}[{index}] = {value} pairs with an infinite bound and must be zero"
            ),
        }
    }
}

impl std::error::Error for DualityError {}

fn h_unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn h_nonpos(x: f64) -> f64 {
    x.min(0.0)
}

fn h_nonneg(x: f64) -> f64 {
    x.max(0.0)
}

/// Constructs the dual certificate at `(phi, lam)`.
///
/// The construction is only guaranteed to be dual feasible at an interior
/// local minimum; the returned [`InteriorReport`] says whether the point
/// qualifies (checked with `tol_eq`). A failing point still yields a
/// certificate, which is useful for diagnosing instances outside the
/// guarantee, but a warning is logged.
pub fn build_certificate(
    spec: &ProblemSpec,
    phi: &[f64],
    lam: &[f64],
    tol_eq: f64,
) -> (DualCertificate, InteriorReport) {
    assert_eq!(phi.len(), spec.m, "phi length");
    assert_eq!(lam.len(), spec.n, "lam length");
    let interior = is_interior_local_min(spec, phi, lam, tol_eq);
    if !interior.all_interior {
        log::warn!(
            "dual certificate built at a point that is not an interior local minimum; \
             it need not be feasible"
        );
    }

    let t = spec.column_activities(phi, lam);
    let x: Vec<f64> = t
        .iter()
        .map(|&tj| {
            if tj > tol_eq {
                1.0
            } else if tj < -tol_eq {
                0.0
            } else {
                0.5
            }
        })
        .collect();

    let row_dot_x = |row: &[(usize, f64)]| -> f64 {
        row.iter().map(|&(j, coeff)| coeff * x[j]).sum()
    };

    let mut s = Vec::with_capacity(spec.m);
    let mut y = Vec::with_capacity(spec.m);
    let mut z = Vec::with_capacity(spec.m);
    for i in 0..spec.m {
        let ax = row_dot_x(spec.mat_a.row(i));
        let si = if spec.w[i] > phi[i] + tol_eq {
            1.0
        } else if spec.w[i] < phi[i] - tol_eq {
            0.0
        } else {
            h_unit(spec.a[i] + ax)
        };
        let zi = if spec.phi_hi[i].is_finite() && (phi[i] - spec.phi_hi[i]).abs() <= tol_eq {
            h_nonpos(spec.a[i] + ax - si)
        } else {
            0.0
        };
        let yi = if spec.phi_lo[i].is_finite() && (phi[i] - spec.phi_lo[i]).abs() <= tol_eq {
            h_nonneg(spec.a[i] + ax - si)
        } else {
            0.0
        };
        s.push(si);
        z.push(zi);
        y.push(yi);
    }

    let mut q = Vec::with_capacity(spec.n);
    let mut r = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let bx = row_dot_x(spec.mat_b.row(i));
        let ri = if spec.lam_hi[i].is_finite() && (lam[i] - spec.lam_hi[i]).abs() <= tol_eq {
            h_nonpos(spec.b[i] + bx)
        } else {
            0.0
        };
        let qi = if spec.lam_lo[i].is_finite() && (lam[i] - spec.lam_lo[i]).abs() <= tol_eq {
            h_nonneg(spec.b[i] + bx)
        } else {
            0.0
        };
        r.push(ri);
        q.push(qi);
    }

    let alpha = (0..spec.m).map(|i| (spec.w[i] - phi[i]).max(0.0)).collect();
    let beta = t.iter().map(|&tj| tj.max(0.0)).collect();

    (DualCertificate { x, s, y, z, q, r, alpha, beta }, interior)
}

/// Dual objective `phi_hi'z + phi_lo'y + w's + lam_hi'r + lam_lo'q + v'x`.
///
/// A term whose bound is infinite contributes zero when its variable is
/// zero and is an error otherwise.
pub fn dual_objective(spec: &ProblemSpec, cert: &DualCertificate) -> Result<f64, DualityError> {
    let mut f = 0.0;
    let mut bound_terms = |bounds: &[f64], vars: &[f64], what: &'static str| {
        for (index, (&bound, &var)) in bounds.iter().zip(vars).enumerate() {
            if bound.is_infinite() {
                if var != 0.0 {
                    return Err(DualityError::InfiniteBoundActive { what, index, value: var });
                }
            } else {
                f += bound * var;
            }
        }
        Ok(())
    };
    bound_terms(&spec.phi_hi, &cert.z, "z")?;
    bound_terms(&spec.phi_lo, &cert.y, "y")?;
    bound_terms(&spec.lam_hi, &cert.r, "r")?;
    bound_terms(&spec.lam_lo, &cert.q, "q")?;
    drop(bound_terms);
    f += spec.w.iter().zip(&cert.s).map(|(&w, &s)| w * s).sum::<f64>();
    f += spec.v.iter().zip(&cert.x).map(|(&v, &x)| v * x).sum::<f64>();
    Ok(f)
}

/// Which complementary-slackness product family a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsFamily {
    /// `x[j] * (beta[j] - A[:,j]'phi - B[:,j]'lam - v[j])`
    BetaRow,
    /// `(1 - x[j]) * beta[j]`
    BetaSign,
    /// `s[i] * (alpha[i] + phi[i] - w[i])`
    AlphaRow,
    /// `(1 - s[i]) * alpha[i]`
    AlphaSign,
    /// `y[i] * (phi[i] - phi_lo[i])`
    PhiLower,
    /// `z[i] * (phi[i] - phi_hi[i])`
    PhiUpper,
    /// `q[i] * (lam[i] - lam_lo[i])`
    LamLower,
    /// `r[i] * (lam[i] - lam_hi[i])`
    LamUpper,
}

#[derive(Debug, Clone)]
pub struct CsViolation {
    pub family: CsFamily,
    pub index: usize,
    pub product: f64,
}

#[derive(Debug, Clone)]
pub struct RangeViolation {
    pub what: &'static str,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// Max |s[i] + z[i] + y[i] - A[i,:]'x - a[i]| over the phi rows.
    pub max_eq_residual_phi: f64,
    /// Max |r[i] + q[i] - B[i,:]'x - b[i]| over the lam rows.
    pub max_eq_residual_lam: f64,
    pub range_violations: Vec<RangeViolation>,
    pub cs_violations: Vec<CsViolation>,
    /// Primal objective minus dual objective. Not part of the verdict:
    /// feasibility and complementarity are checked structurally, the gap is
    /// the quantity they certify.
    pub gap: f64,
    pub verdict: bool,
}

/// Checks a certificate against `(phi, lam)`: dual equality rows, variable
/// ranges, all eight complementary-slackness product families, and the
/// duality gap. Total: problems land in the report, never in an error.
pub fn verify(
    spec: &ProblemSpec,
    phi: &[f64],
    lam: &[f64],
    cert: &DualCertificate,
    tol: f64,
) -> CertificateReport {
    assert_eq!(phi.len(), spec.m, "phi length");
    assert_eq!(lam.len(), spec.n, "lam length");
    assert_eq!(cert.x.len(), spec.p, "x length");
    assert_eq!(cert.s.len(), spec.m, "s length");
    assert_eq!(cert.alpha.len(), spec.m, "alpha length");
    assert_eq!(cert.beta.len(), spec.p, "beta length");

    let mut range_violations = Vec::new();
    let mut check_range = |vals: &[f64], lo: f64, hi: f64, what: &'static str| {
        for (index, &value) in vals.iter().enumerate() {
            if !(value >= lo - tol && value <= hi + tol) {
                range_violations.push(RangeViolation { what, index, value });
            }
        }
    };
    check_range(&cert.x, 0.0, 1.0, "x");
    check_range(&cert.s, 0.0, 1.0, "s");
    check_range(&cert.y, 0.0, f64::INFINITY, "y");
    check_range(&cert.z, f64::NEG_INFINITY, 0.0, "z");
    check_range(&cert.q, 0.0, f64::INFINITY, "q");
    check_range(&cert.r, f64::NEG_INFINITY, 0.0, "r");
    check_range(&cert.alpha, 0.0, f64::INFINITY, "alpha");
    check_range(&cert.beta, 0.0, f64::INFINITY, "beta");
    drop(check_range);

    let row_dot_x = |row: &[(usize, f64)]| -> f64 {
        row.iter().map(|&(j, coeff)| coeff * cert.x[j]).sum()
    };
    let mut max_eq_residual_phi: f64 = 0.0;
    for i in 0..spec.m {
        let residual =
            cert.s[i] + cert.z[i] + cert.y[i] - row_dot_x(spec.mat_a.row(i)) - spec.a[i];
        max_eq_residual_phi = max_eq_residual_phi.max(residual.abs());
    }
    let mut max_eq_residual_lam: f64 = 0.0;
    for i in 0..spec.n {
        let residual = cert.r[i] + cert.q[i] - row_dot_x(spec.mat_b.row(i)) - spec.b[i];
        max_eq_residual_lam = max_eq_residual_lam.max(residual.abs());
    }

    let mut cs_violations = Vec::new();
    // A bound-dual product against an infinite bound is zero iff the dual
    // variable is zero; otherwise it diverges and is reported as infinite.
    let mut check_cs = |family: CsFamily, index: usize, var: f64, slack: f64| {
        let product = if slack.is_infinite() {
            if var == 0.0 {
                0.0
            } else {
                f64::INFINITY * var.signum() * slack.signum()
            }
        } else {
            var * slack
        };
        if product.abs() > tol {
            cs_violations.push(CsViolation { family, index, product });
        }
    };
    let activities = spec.column_activities(phi, lam);
    for j in 0..spec.p {
        check_cs(CsFamily::BetaRow, j, cert.x[j], cert.beta[j] - activities[j]);
        check_cs(CsFamily::BetaSign, j, 1.0 - cert.x[j], cert.beta[j]);
    }
    for i in 0..spec.m {
        check_cs(CsFamily::AlphaRow, i, cert.s[i], cert.alpha[i] + phi[i] - spec.w[i]);
        check_cs(CsFamily::AlphaSign, i, 1.0 - cert.s[i], cert.alpha[i]);
        check_cs(CsFamily::PhiLower, i, cert.y[i], phi[i] - spec.phi_lo[i]);
        check_cs(CsFamily::PhiUpper, i, cert.z[i], phi[i] - spec.phi_hi[i]);
    }
    for i in 0..spec.n {
        check_cs(CsFamily::LamLower, i, cert.q[i], lam[i] - spec.lam_lo[i]);
        check_cs(CsFamily::LamUpper, i, cert.r[i], lam[i] - spec.lam_hi[i]);
    }
    drop(check_cs);

    let primal = spec.objective(phi, lam).expect("lengths asserted above");
    let gap = match dual_objective(spec, cert) {
        Ok(dual) => primal - dual,
        Err(DualityError::InfiniteBoundActive { what, index, value }) => {
            range_violations.push(RangeViolation { what, index, value });
            f64::INFINITY
        }
    };

    let verdict = max_eq_residual_phi <= tol
        && max_eq_residual_lam <= tol
        && range_violations.is_empty()
        && cs_violations.is_empty();
    CertificateReport {
        max_eq_residual_phi,
        max_eq_residual_lam,
        range_violations,
        cs_violations,
        gap,
        verdict,
    }
}
