//! Upper bound on MAP assignment value for models with Potts interactions
//! (pairwise term -1 when the endpoint labels differ, 0 otherwise).
//!
//! Works on the reparametrization LP: minimize sum_i max_k theta^lam_i(k)
//! over edge messages lam_e(k) in [-1/2, 1/2], where
//!
//!   theta^lam_i(k) = theta_i(k) + sum_{(i,j)} lam_ij(k) - sum_{(j,i)} lam_ji(k)
//!
//! over the chosen edge orientation. Each node's max is rewritten against
//! the last label as a reference: max_k t(k) = sum-free form only for two
//! labels, so we encode sum_{k<ref} max{t(k) - t(ref), 0} + t(ref). For
//! K = 2 this equals the max and the optimality guarantee holds. For
//! K >= 3 it is an upper bound on the LP optimum and the reference rows
//! are too dense for the guarantee; callers get the violations reported
//! and a valid but possibly weaker bound.
//!
//! The t(ref) tail telescopes over each edge, so the LP keeps only the
//! hinges plus the constant sum_i theta_i(ref), which goes to the offset.

use crate::model::{ProblemSpec, SparseMatrix};

use super::{Decoder, EncodedInstance, ObjectiveTransform};

#[derive(Debug, Clone, PartialEq)]
pub struct PottsModel {
    pub num_nodes: usize,
    pub num_labels: usize,
    /// theta[i][k]: unary potential of node i under label k.
    pub theta: Vec<Vec<f64>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PottsError {
    TooFewLabels { num_labels: usize },
    ThetaRows { expected: usize, got: usize },
    ThetaRowLen { node: usize, expected: usize, got: usize },
    BadTheta { node: usize, label: usize, value: f64 },
    SelfLoop { edge: usize, node: usize },
    NodeOutOfRange { edge: usize, node: usize, num_nodes: usize },
}

impl std::fmt::Display for PottsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PottsError::TooFewLabels { num_labels } => {
                write!(f, "need at least 2 labels, got {num_labels}")
            }
            PottsError::ThetaRows { expected, got } => {
                write!(f, "theta has {got} rows, expected {expected}")
            }
            PottsError::ThetaRowLen { node, expected, got } => {
                write!(f, "theta row {node} has {got} entries, expected {expected}")
            }
            PottsError::BadTheta { node, label, value } => {
                write!(f, "theta[{node}][{label}] = {value} is not finite")
            }
            PottsError::SelfLoop { edge, node } => {
                write!(f, "edge {edge} is a self-loop at node {node}")
            }
            PottsError::NodeOutOfRange { edge, node, num_nodes } => {
                write!(f, "edge {edge} mentions node {node}, graph has {num_nodes}")
            }
        }
    }
}

impl std::error::Error for PottsError {}

pub fn encode_potts(model: &PottsModel) -> Result<EncodedInstance, PottsError> {
    let k = model.num_labels;
    if k < 2 {
        return Err(PottsError::TooFewLabels { num_labels: k });
    }
    let num_nodes = model.num_nodes;
    if model.theta.len() != num_nodes {
        return Err(PottsError::ThetaRows { expected: num_nodes, got: model.theta.len() });
    }
    for (node, row) in model.theta.iter().enumerate() {
        if row.len() != k {
            return Err(PottsError::ThetaRowLen { node, expected: k, got: row.len() });
        }
        for (label, &value) in row.iter().enumerate() {
            if !value.is_finite() {
                return Err(PottsError::BadTheta { node, label, value });
            }
        }
    }
    let mut edges = Vec::with_capacity(model.edges.len());
    for (e, &(u, v)) in model.edges.iter().enumerate() {
        if u >= num_nodes {
            return Err(PottsError::NodeOutOfRange { edge: e, node: u, num_nodes });
        }
        if v >= num_nodes {
            return Err(PottsError::NodeOutOfRange { edge: e, node: v, num_nodes });
        }
        if u == v {
            return Err(PottsError::SelfLoop { edge: e, node: u });
        }
        edges.push((u.min(v), u.max(v)));
    }
    edges.sort_unstable();
    edges.dedup();

    let reference = k - 1;
    let cols_per_node = k - 1;
    let p = num_nodes * cols_per_node;
    let n = edges.len() * k;
    let col = |node: usize, label: usize| node * cols_per_node + label;

    let mut spec = ProblemSpec::with_dims(0, n, p);
    for (i, row) in model.theta.iter().enumerate() {
        for label in 0..cols_per_node {
            spec.v[col(i, label)] = row[label] - row[reference];
        }
    }
    let mut triplets = Vec::with_capacity(edges.len() * 4 * cols_per_node);
    for (e, &(i, j)) in edges.iter().enumerate() {
        for label in 0..k {
            let r = e * k + label;
            spec.lam_lo[r] = -0.5;
            spec.lam_hi[r] = 0.5;
            if label < reference {
                triplets.push((r, col(i, label), 1.0));
                triplets.push((r, col(j, label), -1.0));
            } else {
                // lam_e(ref) moves every hinge of both endpoints: it
                // enters each argument through the subtracted t(ref).
                for below in 0..cols_per_node {
                    triplets.push((r, col(i, below), -1.0));
                    triplets.push((r, col(j, below), 1.0));
                }
            }
        }
    }
    spec.mat_b = SparseMatrix::from_triplets(n, p, &triplets);

    let offset: f64 = model.theta.iter().map(|row| row[reference]).sum();
    Ok(EncodedInstance {
        spec,
        decoder: Decoder::Potts { theta: model.theta.clone(), num_labels: k, edges },
        transform: ObjectiveTransform { sign: 1.0, offset },
    })
}
