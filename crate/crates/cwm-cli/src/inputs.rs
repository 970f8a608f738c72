//! Parsers for the application input formats.
//!
//! WCNF and flow files follow DIMACS conventions: `c` comment lines, a `p`
//! problem line, 1-based identifiers. Vertex cover and Potts files use `#`
//! comments; vertex cover ids are 1-based, Potts ids are 0-based.

use std::collections::HashSet;

use cwm_core::encoders::{Clause, FlowNetwork, Literal, MaxSatFormula, PottsModel, VcGraph};

use crate::format::ParseError;

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn content_lines<'a>(
    text: &'a str,
    comment: &'a str,
) -> impl Iterator<Item = (usize, Vec<&'a str>)> + 'a {
    text.lines().enumerate().filter_map(move |(idx, raw)| {
        let body = if comment == "#" {
            match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
        } else {
            raw
        };
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.is_empty() || toks[0] == comment {
            None
        } else {
            Some((idx + 1, toks))
        }
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, what: &str, line: usize) -> Result<T, ParseError> {
    tok.parse().map_err(|_| err(line, format!("bad {what} '{tok}'")))
}

/// `p wcnf <vars> <clauses> <top>` followed by clause lines
/// `<weight> <lit>... 0`. A clause whose weight equals `top` is hard.
/// The declared clause count is not enforced.
pub fn parse_wcnf(text: &str) -> Result<MaxSatFormula, ParseError> {
    let mut lines = content_lines(text, "c");
    let (p_line, toks) = lines.next().ok_or_else(|| err(0, "missing 'p wcnf' line"))?;
    if toks.len() != 5 || toks[0] != "p" || toks[1] != "wcnf" {
        return Err(err(p_line, "expected 'p wcnf <vars> <clauses> <top>'"));
    }
    let num_vars: usize = parse_num(toks[2], "variable count", p_line)?;
    let _declared: usize = parse_num(toks[3], "clause count", p_line)?;
    let top: f64 = parse_num(toks[4], "top weight", p_line)?;
    if !(top.is_finite() && top > 0.0) {
        return Err(err(p_line, format!("top weight must be positive and finite, got {top}")));
    }

    let mut formula = MaxSatFormula { num_vars, soft: Vec::new(), hard: Vec::new() };
    for (line, toks) in lines {
        if toks[0] == "p" {
            return Err(err(line, "second 'p' line"));
        }
        let weight: f64 = parse_num(toks[0], "clause weight", line)?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(err(line, format!("clause weight must be positive, got {weight}")));
        }
        if weight > top {
            return Err(err(line, format!("clause weight {weight} exceeds top {top}")));
        }
        if toks.last() != Some(&"0") {
            return Err(err(line, "clause must end with 0"));
        }
        let mut literals = Vec::with_capacity(toks.len() - 2);
        for tok in &toks[1..toks.len() - 1] {
            let lit: i64 = parse_num(tok, "literal", line)?;
            if lit == 0 {
                return Err(err(line, "literal 0 before end of clause"));
            }
            let var = lit.unsigned_abs() as usize - 1;
            if var >= num_vars {
                return Err(err(line, format!("variable {} out of range (<= {num_vars})", lit.abs())));
            }
            literals.push(if lit > 0 { Literal::pos(var) } else { Literal::neg(var) });
        }
        let clause = Clause::new(literals);
        if weight == top {
            formula.hard.push(clause);
        } else {
            formula.soft.push((weight, clause));
        }
    }
    Ok(formula)
}

/// `p max <nodes> <arcs>`, `n <id> s`, `n <id> t`, `a <tail> <head> <cap>`.
/// Exactly one source and one sink; ids are 1-based.
pub fn parse_flow(text: &str) -> Result<FlowNetwork, ParseError> {
    let mut lines = content_lines(text, "c");
    let (p_line, toks) = lines.next().ok_or_else(|| err(0, "missing 'p max' line"))?;
    if toks.len() != 4 || toks[0] != "p" || toks[1] != "max" {
        return Err(err(p_line, "expected 'p max <nodes> <arcs>'"));
    }
    let num_nodes: usize = parse_num(toks[2], "node count", p_line)?;
    let _declared: usize = parse_num(toks[3], "arc count", p_line)?;

    let node_id = |tok: &str, line: usize| -> Result<usize, ParseError> {
        let id: usize = parse_num(tok, "node id", line)?;
        if id == 0 || id > num_nodes {
            return Err(err(line, format!("node id {id} out of range (1..={num_nodes})")));
        }
        Ok(id - 1)
    };

    let mut source = None;
    let mut sink = None;
    let mut arcs = Vec::new();
    for (line, toks) in lines {
        match toks[0] {
            "n" => {
                if toks.len() != 3 {
                    return Err(err(line, "expected 'n <id> <s|t>'"));
                }
                let id = node_id(toks[1], line)?;
                let slot = match toks[2] {
                    "s" => &mut source,
                    "t" => &mut sink,
                    other => return Err(err(line, format!("node role must be s or t, got '{other}'"))),
                };
                if slot.is_some() {
                    return Err(err(line, format!("duplicate '{}' declaration", toks[2])));
                }
                *slot = Some(id);
            }
            "a" => {
                if toks.len() != 4 {
                    return Err(err(line, "expected 'a <tail> <head> <capacity>'"));
                }
                let tail = node_id(toks[1], line)?;
                let head = node_id(toks[2], line)?;
                let cap: f64 = parse_num(toks[3], "capacity", line)?;
                if cap.is_nan() {
                    return Err(err(line, "NaN capacity"));
                }
                arcs.push((tail, head, cap));
            }
            other => return Err(err(line, format!("unknown record '{other}'"))),
        }
    }
    let source = source.ok_or_else(|| err(p_line, "no source ('n <id> s') declared"))?;
    let sink = sink.ok_or_else(|| err(p_line, "no sink ('n <id> t') declared"))?;
    Ok(FlowNetwork { num_nodes, source, sink, arcs })
}

/// `n <id> <weight>` and `e <u> <v>` lines, ids 1-based. The node count is
/// the largest id mentioned; undeclared nodes get weight 1.
pub fn parse_vc(text: &str) -> Result<VcGraph, ParseError> {
    let mut decls: Vec<(usize, f64)> = Vec::new();
    let mut declared: HashSet<usize> = HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut max_id = 0usize;

    for (line, toks) in content_lines(text, "#") {
        let mut node_id = |tok: &str| -> Result<usize, ParseError> {
            let id: usize = parse_num(tok, "node id", line)?;
            if id == 0 {
                return Err(err(line, "node ids are 1-based"));
            }
            max_id = max_id.max(id);
            Ok(id - 1)
        };
        match toks[0] {
            "n" => {
                if toks.len() != 3 {
                    return Err(err(line, "expected 'n <id> <weight>'"));
                }
                let id = node_id(toks[1])?;
                let weight: f64 = parse_num(toks[2], "weight", line)?;
                if !declared.insert(id) {
                    return Err(err(line, format!("duplicate weight for node {}", id + 1)));
                }
                decls.push((id, weight));
            }
            "e" => {
                if toks.len() != 3 {
                    return Err(err(line, "expected 'e <u> <v>'"));
                }
                let u = node_id(toks[1])?;
                let v = node_id(toks[2])?;
                edges.push((u, v));
            }
            other => return Err(err(line, format!("unknown record '{other}'"))),
        }
    }

    let mut weights = vec![1.0; max_id];
    for (id, weight) in decls {
        weights[id] = weight;
    }
    Ok(VcGraph { weights, edges })
}

/// Header `potts <nodes> <edges> <labels>`, then `theta <node> <label> <val>`
/// (default 0) and `edge <i> <j>` records, all ids 0-based.
pub fn parse_potts(text: &str) -> Result<PottsModel, ParseError> {
    let mut lines = content_lines(text, "#");
    let (h_line, toks) = lines.next().ok_or_else(|| err(0, "missing 'potts' header"))?;
    if toks.len() != 4 || toks[0] != "potts" {
        return Err(err(h_line, "expected 'potts <nodes> <edges> <labels>'"));
    }
    let num_nodes: usize = parse_num(toks[1], "node count", h_line)?;
    let _declared: usize = parse_num(toks[2], "edge count", h_line)?;
    let num_labels: usize = parse_num(toks[3], "label count", h_line)?;

    let node_id = |tok: &str, line: usize| -> Result<usize, ParseError> {
        let id: usize = parse_num(tok, "node id", line)?;
        if id >= num_nodes {
            return Err(err(line, format!("node id {id} out of range (< {num_nodes})")));
        }
        Ok(id)
    };

    let mut theta = vec![vec![0.0; num_labels]; num_nodes];
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for (line, toks) in lines {
        match toks[0] {
            "theta" => {
                if toks.len() != 4 {
                    return Err(err(line, "expected 'theta <node> <label> <value>'"));
                }
                let i = node_id(toks[1], line)?;
                let k: usize = parse_num(toks[2], "label", line)?;
                if k >= num_labels {
                    return Err(err(line, format!("label {k} out of range (< {num_labels})")));
                }
                let value: f64 = parse_num(toks[3], "value", line)?;
                if !seen.insert((i, k)) {
                    return Err(err(line, format!("duplicate theta for node {i} label {k}")));
                }
                theta[i][k] = value;
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(err(line, "expected 'edge <i> <j>'"));
                }
                edges.push((node_id(toks[1], line)?, node_id(toks[2], line)?));
            }
            other => return Err(err(line, format!("unknown record '{other}'"))),
        }
    }
    Ok(PottsModel { num_nodes, num_labels, theta, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wcnf_splits_soft_and_hard() {
        let text = "\
c tiny instance
p wcnf 3 4 100
100 1 -2 0
3 2 3 0
1 -3 0
100 -1 0
";
        let f = parse_wcnf(text).unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.hard.len(), 2);
        assert_eq!(f.soft.len(), 2);
        assert_eq!(f.hard[0].literals, vec![Literal::pos(0), Literal::neg(1)]);
        assert_eq!(f.soft[0].0, 3.0);
        assert_eq!(f.soft[1].1.literals, vec![Literal::neg(2)]);
    }

    #[test]
    fn wcnf_rejects_malformed_lines() {
        let cases: &[(&str, usize, &str)] = &[
            ("c only comments\n", 0, "missing 'p wcnf'"),
            ("p cnf 1 1 10\n", 1, "expected 'p wcnf"),
            ("p wcnf 1 1 10\n5 1\n", 2, "end with 0"),
            ("p wcnf 1 1 10\n5 0 1 0\n", 2, "literal 0 before end"),
            ("p wcnf 1 1 10\n5 2 0\n", 2, "out of range"),
            ("p wcnf 1 1 10\n11 1 0\n", 2, "exceeds top"),
            ("p wcnf 1 1 10\n-1 1 0\n", 2, "must be positive"),
            ("p wcnf 1 1 10\np wcnf 1 1 10\n", 2, "second 'p' line"),
        ];
        for (text, line, needle) in cases {
            let e = parse_wcnf(text).unwrap_err();
            assert_eq!(e.line, *line, "wrong line for {text:?}");
            assert!(e.message.contains(needle), "{:?} lacks {needle:?}", e.message);
        }
    }

    #[test]
    fn flow_reads_terminals_and_arcs() {
        let text = "\
c three nodes in a line
p max 3 2
n 1 s
n 3 t
a 1 2 2
a 2 3 1
";
        let net = parse_flow(text).unwrap();
        assert_eq!(net.num_nodes, 3);
        assert_eq!(net.source, 0);
        assert_eq!(net.sink, 2);
        assert_eq!(net.arcs, vec![(0, 1, 2.0), (1, 2, 1.0)]);
    }

    #[test]
    fn flow_requires_one_source_and_one_sink() {
        let text = "p max 2 0\nn 1 s\n";
        assert!(parse_flow(text).unwrap_err().message.contains("no sink"));
        let text = "p max 2 0\nn 1 s\nn 2 s\n";
        assert!(parse_flow(text).unwrap_err().message.contains("duplicate 's'"));
        let text = "p max 2 1\nn 1 s\nn 2 t\na 1 3 1\n";
        assert!(parse_flow(text).unwrap_err().message.contains("out of range"));
    }

    #[test]
    fn vc_defaults_weights_and_sizes_by_max_id() {
        let text = "\
# a path with one weighted node
n 2 5.5
e 1 2
e 2 4
";
        let g = parse_vc(text).unwrap();
        assert_eq!(g.weights, vec![1.0, 5.5, 1.0, 1.0]);
        assert_eq!(g.edges, vec![(0, 1), (1, 3)]);
        assert!(parse_vc("n 1 2\nn 1 3\n").unwrap_err().message.contains("duplicate weight"));
        assert!(parse_vc("e 0 1\n").unwrap_err().message.contains("1-based"));
    }

    #[test]
    fn potts_fills_theta_defaults() {
        let text = "\
potts 2 1 3
theta 0 0 4
theta 1 2 -1
edge 0 1
";
        let model = parse_potts(text).unwrap();
        assert_eq!(model.theta, vec![vec![4.0, 0.0, 0.0], vec![0.0, 0.0, -1.0]]);
        assert_eq!(model.edges, vec![(0, 1)]);
        let e = parse_potts("potts 1 0 2\ntheta 0 5 1\n").unwrap_err();
        assert!(e.message.contains("label 5 out of range"));
        let e = parse_potts("potts 1 0 2\ntheta 0 0 1\ntheta 0 0 2\n").unwrap_err();
        assert_eq!(e.line, 3);
    }
}
