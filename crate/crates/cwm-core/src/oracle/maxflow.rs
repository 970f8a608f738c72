//! Reference max-flow via shortest augmenting paths (BFS), used to check the
//! min-cut values obtained from solved network instances.

use std::collections::VecDeque;

/// Maximum s-t flow of the directed network given as `(from, to, capacity)`
/// arcs. Exact for integer capacities (augmentation amounts stay integral).
///
/// Parallel arcs are allowed; capacities must be non-negative and finite.
pub fn maxflow_reference(
    num_nodes: usize,
    source: usize,
    sink: usize,
    arcs: &[(usize, usize, f64)],
) -> f64 {
    assert!(source < num_nodes && sink < num_nodes && source != sink);
    for &(u, v, cap) in arcs {
        assert!(u < num_nodes && v < num_nodes, "arc endpoint out of range");
        assert!(cap >= 0.0 && cap.is_finite(), "capacity must be finite and non-negative");
    }

    // Adjacency of edge indices; residual[e] pairs with residual[e^1].
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
    let mut to: Vec<usize> = Vec::with_capacity(arcs.len() * 2);
    let mut residual: Vec<f64> = Vec::with_capacity(arcs.len() * 2);
    for &(u, v, cap) in arcs {
        adj[u].push(to.len());
        to.push(v);
        residual.push(cap);
        adj[v].push(to.len());
        to.push(u);
        residual.push(0.0);
    }

    let mut flow = 0.0;
    loop {
        // BFS for the shortest residual path.
        let mut prev_edge: Vec<Option<usize>> = vec![None; num_nodes];
        let mut visited = vec![false; num_nodes];
        visited[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for &e in &adj[u] {
                let v = to[e];
                if !visited[v] && residual[e] > 0.0 {
                    visited[v] = true;
                    prev_edge[v] = Some(e);
                    queue.push_back(v);
                }
            }
        }
        if !visited[sink] {
            return flow;
        }

        let mut bottleneck = f64::INFINITY;
        let mut node = sink;
        while node != source {
            let e = prev_edge[node].unwrap();
            bottleneck = bottleneck.min(residual[e]);
            node = to[e ^ 1];
        }
        let mut node = sink;
        while node != source {
            let e = prev_edge[node].unwrap();
            residual[e] -= bottleneck;
            residual[e ^ 1] += bottleneck;
            node = to[e ^ 1];
        }
        flow += bottleneck;
    }
}
