//! Min s-t cut via the cut covering LP.
//!
//! One phi >= 0 per arc, capped by a w-hinge at the arc capacity, with
//! linear cost 1 on every arc whose tail is not the source. One column per
//! non-terminal node u: +1 on arcs into u, -1 on arcs out of u. The LP
//! optimum equals total capacity minus the max-flow value, and the dual x
//! recovers the source side of a minimum cut.
//!
//! Preconditions on the network: no self-loops, no arc into the source, no
//! arc out of the sink, and no direct source-to-sink arc (split such an
//! arc with an auxiliary node before encoding).

use crate::model::{ProblemSpec, SparseMatrix};

use super::{Decoder, EncodedInstance, ObjectiveTransform};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    pub num_nodes: usize,
    pub source: usize,
    pub sink: usize,
    /// (tail, head, capacity). Parallel arcs are allowed.
    pub arcs: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    SourceIsSink { node: usize },
    TerminalOutOfRange { what: &'static str, node: usize, num_nodes: usize },
    NodeOutOfRange { arc: usize, node: usize, num_nodes: usize },
    SelfLoop { arc: usize, node: usize },
    ArcIntoSource { arc: usize },
    ArcOutOfSink { arc: usize },
    ArcSourceToSink { arc: usize },
    BadCapacity { arc: usize, capacity: f64 },
}

impl std::fmt::Display for FlowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowError::SourceIsSink { node } => {
                write!(f, "source and sink are both node {node}")
            }
            FlowError::TerminalOutOfRange { what, node, num_nodes } => {
                write!(f, "{what} is node {node}, graph has {num_nodes}")
            }
            FlowError::NodeOutOfRange { arc, node, num_nodes } => {
                write!(f, "arc {arc} mentions node {node}, graph has {num_nodes}")
            }
            FlowError::SelfLoop { arc, node } => {
                write!(f, "arc {arc} is a self-loop at node {node}")
            }
            FlowError::ArcIntoSource { arc } => {
                write!(f, "arc {arc} enters the source")
            }
            FlowError::ArcOutOfSink { arc } => {
                write!(f, "arc {arc} leaves the sink")
            }
            FlowError::ArcSourceToSink { arc } => {
                write!(f, "arc {arc} goes directly from source to sink; split it first")
            }
            FlowError::BadCapacity { arc, capacity } => {
                write!(f, "arc {arc} has capacity {capacity}, need finite >= 0")
            }
        }
    }
}

impl std::error::Error for FlowError {}

pub fn encode_maxflow(net: &FlowNetwork) -> Result<EncodedInstance, FlowError> {
    let nn = net.num_nodes;
    if net.source >= nn {
        return Err(FlowError::TerminalOutOfRange {
            what: "source",
            node: net.source,
            num_nodes: nn,
        });
    }
    if net.sink >= nn {
        return Err(FlowError::TerminalOutOfRange {
            what: "sink",
            node: net.sink,
            num_nodes: nn,
        });
    }
    if net.source == net.sink {
        return Err(FlowError::SourceIsSink { node: net.source });
    }
    for (arc, &(tail, head, capacity)) in net.arcs.iter().enumerate() {
        if tail >= nn {
            return Err(FlowError::NodeOutOfRange { arc, node: tail, num_nodes: nn });
        }
        if head >= nn {
            return Err(FlowError::NodeOutOfRange { arc, node: head, num_nodes: nn });
        }
        if tail == head {
            return Err(FlowError::SelfLoop { arc, node: tail });
        }
        if head == net.source {
            return Err(FlowError::ArcIntoSource { arc });
        }
        if tail == net.sink {
            return Err(FlowError::ArcOutOfSink { arc });
        }
        if tail == net.source && head == net.sink {
            return Err(FlowError::ArcSourceToSink { arc });
        }
        if !capacity.is_finite() || capacity < 0.0 {
            return Err(FlowError::BadCapacity { arc, capacity });
        }
    }

    // Non-terminal nodes in ascending id order, isolated ones included.
    let internal: Vec<usize> =
        (0..nn).filter(|&u| u != net.source && u != net.sink).collect();
    let mut col_of = vec![usize::MAX; nn];
    for (col, &u) in internal.iter().enumerate() {
        col_of[u] = col;
    }

    let m = net.arcs.len();
    let p = internal.len();
    let mut spec = ProblemSpec::with_dims(m, 0, p);
    let mut triplets = Vec::with_capacity(2 * m);
    let mut total_capacity = 0.0;
    for (i, &(tail, head, capacity)) in net.arcs.iter().enumerate() {
        spec.w[i] = capacity;
        spec.phi_lo[i] = 0.0;
        if tail != net.source {
            spec.a[i] = 1.0;
        }
        if head != net.sink {
            triplets.push((i, col_of[head], 1.0));
        }
        if tail != net.source {
            triplets.push((i, col_of[tail], -1.0));
        }
        total_capacity += capacity;
    }
    spec.mat_a = SparseMatrix::from_triplets(m, p, &triplets);

    Ok(EncodedInstance {
        spec,
        decoder: Decoder::MaxFlow {
            num_nodes: nn,
            source: net.source,
            sink: net.sink,
            arcs: net.arcs.clone(),
            total_capacity,
            internal,
        },
        transform: ObjectiveTransform { sign: -1.0, offset: total_capacity },
    })
}
