//! Weighted vertex cover via its LP relaxation.
//!
//! One column per node (the cover indicator lives in the dual vector x),
//! one lambda per edge with row +1/+1 at the endpoints and b = -1. The
//! relaxation is half-integral: x lands in {0, 1/2, 1}.

use crate::model::{ProblemSpec, SparseMatrix};

use super::{Decoder, EncodedInstance, ObjectiveTransform};

#[derive(Debug, Clone, PartialEq)]
pub struct VcGraph {
    /// Node weights; the node count is `weights.len()`.
    pub weights: Vec<f64>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VcError {
    SelfLoop { edge: usize, node: usize },
    NodeOutOfRange { edge: usize, node: usize, num_nodes: usize },
    BadWeight { node: usize, weight: f64 },
}

impl std::fmt::Display for VcError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VcError::SelfLoop { edge, node } => {
                write!(f, "edge {edge} is a self-loop at node {node}")
            }
            VcError::NodeOutOfRange { edge, node, num_nodes } => {
                write!(f, "edge {edge} mentions node {node}, graph has {num_nodes}")
            }
            VcError::BadWeight { node, weight } => {
                write!(f, "node {node} has weight {weight}, need finite >= 0")
            }
        }
    }
}

impl std::error::Error for VcError {}

/// Builds the covering LP. The LP optimum equals minus the cover relaxation
/// value, so the transform is sign -1, offset 0.
pub fn encode_vertex_cover(graph: &VcGraph) -> Result<EncodedInstance, VcError> {
    let num_nodes = graph.weights.len();
    for (node, &weight) in graph.weights.iter().enumerate() {
        if !weight.is_finite() || weight < 0.0 {
            return Err(VcError::BadWeight { node, weight });
        }
    }
    let mut edges = Vec::with_capacity(graph.edges.len());
    for (e, &(u, v)) in graph.edges.iter().enumerate() {
        if u >= num_nodes {
            return Err(VcError::NodeOutOfRange { edge: e, node: u, num_nodes });
        }
        if v >= num_nodes {
            return Err(VcError::NodeOutOfRange { edge: e, node: v, num_nodes });
        }
        if u == v {
            return Err(VcError::SelfLoop { edge: e, node: u });
        }
        edges.push((u.min(v), u.max(v)));
    }
    edges.sort_unstable();
    edges.dedup();

    let n = edges.len();
    let p = num_nodes;
    let mut spec = ProblemSpec::with_dims(0, n, p);
    let mut triplets = Vec::with_capacity(2 * n);
    for (e, &(u, v)) in edges.iter().enumerate() {
        triplets.push((e, u, 1.0));
        triplets.push((e, v, 1.0));
        spec.b[e] = -1.0;
        spec.lam_lo[e] = 0.0;
    }
    spec.mat_b = SparseMatrix::from_triplets(n, p, &triplets);
    for (j, &weight) in graph.weights.iter().enumerate() {
        spec.v[j] = -weight;
    }

    Ok(EncodedInstance {
        spec,
        decoder: Decoder::VertexCover { num_nodes },
        transform: ObjectiveTransform { sign: -1.0, offset: 0.0 },
    })
}
