//! Encoders from combinatorial problems to the hinge-sum form, plus the
//! decoder that maps solver output and certificates back.
//!
//! Each encoder produces an [`EncodedInstance`]: the spec, a [`Decoder`]
//! describing what the spec's indices mean, and an [`ObjectiveTransform`]
//! such that `application optimum = sign * LP optimum + offset`.

mod maxflow;
mod maxsat;
mod potts;
mod vertex_cover;

pub use maxflow::{encode_maxflow, FlowError, FlowNetwork};
pub use maxsat::{encode_maxsat, encode_min_ones, Clause, Literal, MaxSatError, MaxSatFormula};
pub use potts::{encode_potts, PottsError, PottsModel};
pub use vertex_cover::{encode_vertex_cover, VcError, VcGraph};

use crate::duality::DualCertificate;
use crate::model::ProblemSpec;
use crate::solver::SolveResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTransform {
    /// +1.0 or -1.0.
    pub sign: f64,
    pub offset: f64,
}

impl ObjectiveTransform {
    pub fn apply(&self, lp_value: f64) -> f64 {
        self.sign * lp_value + self.offset
    }
}

/// What the spec's variables and columns stand for.
#[derive(Debug, Clone)]
pub enum Decoder {
    /// Column j is logical variable j.
    MaxSat { num_vars: usize, min_ones: bool, has_unit_clause: bool },
    /// Column j is node j; lam row e is edge e.
    VertexCover { num_nodes: usize },
    /// phi i is arc i; column j is `internal[j]` (a non-terminal node).
    MaxFlow {
        num_nodes: usize,
        source: usize,
        sink: usize,
        arcs: Vec<(usize, usize, f64)>,
        total_capacity: f64,
        /// Node id per spec column.
        internal: Vec<usize>,
    },
    /// Column (i, k) for k below the reference label, laid out row-major;
    /// lam (e, k) for all K labels, row-major.
    Potts { theta: Vec<Vec<f64>>, num_labels: usize, edges: Vec<(usize, usize)> },
}

#[derive(Debug, Clone)]
pub struct EncodedInstance {
    pub spec: ProblemSpec,
    pub decoder: Decoder,
    pub transform: ObjectiveTransform,
}

#[derive(Debug, Clone)]
pub enum DecodeError {
    /// Result or certificate dimensions do not match the instance.
    Mismatch { what: &'static str, expected: usize, got: usize },
}

impl std::fmt::Display for DecodeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DecodeError::Mismatch { what, expected, got } => {
                write!(f, "{what} has length {got}, expected {expected}")
            }
        }
    }
}

impl std::error::Error for DecodeError {}

/// Application-level view of a solved instance.
#[derive(Debug, Clone)]
pub enum AppSolution {
    MaxSat {
        /// Fractional assignment per logical variable, each 0, 1/2, or 1.
        assignment: Vec<f64>,
        /// Bound on the application optimum implied by the LP value.
        bound: f64,
        /// True when the formula has no unit clause, in which case the
        /// all-halves assignment is trivially optimal for the relaxation
        /// and the bound carries little information.
        degenerate_half: bool,
    },
    VertexCover {
        /// Fractional cover indicator per node.
        cover: Vec<f64>,
        value: f64,
    },
    Cut {
        /// Cut capacity: total capacity minus the dual objective.
        value: f64,
        /// Per node: true when on the source side.
        source_side: Vec<bool>,
        /// Raw indicator per node (source 1, sink 0, else the dual x).
        indicator: Vec<f64>,
    },
    Potts {
        /// Reparametrized unaries theta^lam per node and label.
        reparametrized: Vec<Vec<f64>>,
        /// Bound on the application optimum implied by the LP value.
        bound: f64,
    },
}

/// Maps a solve result and its certificate back to application terms.
pub fn decode(
    inst: &EncodedInstance,
    result: &SolveResult,
    cert: &DualCertificate,
) -> Result<AppSolution, DecodeError> {
    let spec = &inst.spec;
    check_len("phi", result.phi.len(), spec.m)?;
    check_len("lam", result.lam.len(), spec.n)?;
    check_len("x", cert.x.len(), spec.p)?;

    Ok(match &inst.decoder {
        Decoder::MaxSat { has_unit_clause, .. } => AppSolution::MaxSat {
            assignment: cert.x.clone(),
            bound: inst.transform.apply(result.objective_value),
            degenerate_half: !has_unit_clause,
        },
        Decoder::VertexCover { .. } => AppSolution::VertexCover {
            cover: cert.x.clone(),
            value: inst.transform.apply(result.objective_value),
        },
        Decoder::MaxFlow { num_nodes, source, sink, total_capacity, internal, .. } => {
            let dual = crate::duality::dual_objective(spec, cert).unwrap_or(f64::NAN);
            let mut indicator = vec![0.0; *num_nodes];
            indicator[*source] = 1.0;
            for (col, &node) in internal.iter().enumerate() {
                indicator[node] = cert.x[col];
            }
            indicator[*sink] = 0.0;
            let source_side = indicator.iter().map(|&x| x > 0.5).collect();
            AppSolution::Cut { value: total_capacity - dual, source_side, indicator }
        }
        Decoder::Potts { theta, num_labels, edges } => {
            let k = *num_labels;
            check_len("lam", result.lam.len(), edges.len() * k)?;
            let mut reparametrized: Vec<Vec<f64>> = theta.clone();
            for (e, &(i, j)) in edges.iter().enumerate() {
                for label in 0..k {
                    let lam = result.lam[e * k + label];
                    // theta^lam adds lam over out-edges and subtracts it
                    // over in-edges of the chosen orientation.
                    reparametrized[i][label] += lam;
                    reparametrized[j][label] -= lam;
                }
            }
            AppSolution::Potts {
                reparametrized,
                bound: inst.transform.apply(result.objective_value),
            }
        }
    })
}

fn check_len(what: &'static str, got: usize, expected: usize) -> Result<(), DecodeError> {
    if got != expected {
        return Err(DecodeError::Mismatch { what, expected, got });
    }
    Ok(())
}
