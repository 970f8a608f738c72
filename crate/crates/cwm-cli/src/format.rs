//! The `.cwm` problem file format and the certificate output format.
//!
//! Problem files are line oriented. `#` starts a comment, blank lines are
//! skipped. The first two records must be the header `cwm 1` and the
//! dimension record `dims <m> <n> <p>`. After that, any order:
//!
//! ```text
//! a <i> <val>        w <i> <val>        v <j> <val>
//! b <i> <val>
//! philo <i> <val>    phihi <i> <val>    # phi box, default [-inf, inf]
//! lamlo <i> <val>    lamhi <i> <val>    # lambda box
//! A <i> <j> <val>    B <i> <j> <val>
//! ```
//!
//! Indices are 0-based. Unmentioned vector entries are 0, unmentioned bounds
//! are infinite. `inf` and `-inf` are accepted where a bound goes. Repeating
//! a record for the same index (or the same matrix cell) is an error; the
//! format has no accumulation semantics.

use std::collections::HashSet;
use std::fmt;

use cwm_core::duality::DualCertificate;
use cwm_core::model::SparseMatrix;
use cwm_core::ProblemSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Meaningful lines with their 1-based line numbers, comments stripped.
fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let body = body.trim();
        if body.is_empty() {
            None
        } else {
            Some((idx + 1, body))
        }
    })
}

fn parse_index(token: &str, limit: usize, what: &str, line: usize) -> Result<usize, ParseError> {
    let idx: usize = token
        .parse()
        .map_err(|_| err(line, format!("bad {what} index '{token}'")))?;
    if idx >= limit {
        return Err(err(line, format!("{what} index {idx} out of range (< {limit})")));
    }
    Ok(idx)
}

fn parse_value(token: &str, allow_infinite: bool, line: usize) -> Result<f64, ParseError> {
    let value: f64 = token
        .parse()
        .map_err(|_| err(line, format!("bad number '{token}'")))?;
    if value.is_nan() {
        return Err(err(line, "NaN is not a value"));
    }
    if !allow_infinite && !value.is_finite() {
        return Err(err(line, format!("'{token}' must be finite here")));
    }
    Ok(value)
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, ParseError> {
    let mut lines = records(text);

    let (header_line, header) = lines.next().ok_or_else(|| err(0, "empty file"))?;
    if header != "cwm 1" {
        return Err(err(header_line, format!("expected header 'cwm 1', got '{header}'")));
    }

    let (dims_line, dims) = lines
        .next()
        .ok_or_else(|| err(header_line, "missing 'dims m n p' record"))?;
    let toks: Vec<&str> = dims.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "dims" {
        return Err(err(dims_line, "expected 'dims <m> <n> <p>'"));
    }
    let parse_dim = |tok: &str| -> Result<usize, ParseError> {
        tok.parse().map_err(|_| err(dims_line, format!("bad dimension '{tok}'")))
    };
    let m = parse_dim(toks[1])?;
    let n = parse_dim(toks[2])?;
    let p = parse_dim(toks[3])?;

    let mut spec = ProblemSpec::with_dims(m, n, p);
    let mut a_triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut b_triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen: HashSet<(&'static str, usize, usize)> = HashSet::new();
    let mut claim = |key: (&'static str, usize, usize), line: usize| -> Result<(), ParseError> {
        if !seen.insert(key) {
            return Err(err(line, format!("duplicate record '{}'", key.0)));
        }
        Ok(())
    };

    for (line, body) in lines {
        let toks: Vec<&str> = body.split_whitespace().collect();
        let tag = toks[0];
        match tag {
            "a" | "b" | "w" | "v" | "philo" | "phihi" | "lamlo" | "lamhi" => {
                if toks.len() != 3 {
                    return Err(err(line, format!("expected '{tag} <index> <value>'")));
                }
                let (limit, what, infinite_ok) = match tag {
                    "a" | "w" | "philo" | "phihi" => (m, "row", tag.starts_with("phi")),
                    "b" | "lamlo" | "lamhi" => (n, "row", tag.starts_with("lam")),
                    _ => (p, "column", false),
                };
                let idx = parse_index(toks[1], limit, what, line)?;
                let value = parse_value(toks[2], infinite_ok, line)?;
                match tag {
                    "a" => {
                        claim(("a", idx, 0), line)?;
                        spec.a[idx] = value;
                    }
                    "b" => {
                        claim(("b", idx, 0), line)?;
                        spec.b[idx] = value;
                    }
                    "w" => {
                        claim(("w", idx, 0), line)?;
                        spec.w[idx] = value;
                    }
                    "v" => {
                        claim(("v", idx, 0), line)?;
                        spec.v[idx] = value;
                    }
                    "philo" => {
                        claim(("philo", idx, 0), line)?;
                        spec.phi_lo[idx] = value;
                    }
                    "phihi" => {
                        claim(("phihi", idx, 0), line)?;
                        spec.phi_hi[idx] = value;
                    }
                    "lamlo" => {
                        claim(("lamlo", idx, 0), line)?;
                        spec.lam_lo[idx] = value;
                    }
                    "lamhi" => {
                        claim(("lamhi", idx, 0), line)?;
                        spec.lam_hi[idx] = value;
                    }
                    _ => unreachable!(),
                }
            }
            "A" | "B" => {
                if toks.len() != 4 {
                    return Err(err(line, format!("expected '{tag} <row> <col> <value>'")));
                }
                let rows = if tag == "A" { m } else { n };
                let i = parse_index(toks[1], rows, "row", line)?;
                let j = parse_index(toks[2], p, "column", line)?;
                let value = parse_value(toks[3], false, line)?;
                if tag == "A" {
                    claim(("A", i, j), line)?;
                    a_triplets.push((i, j, value));
                } else {
                    claim(("B", i, j), line)?;
                    b_triplets.push((i, j, value));
                }
            }
            _ => return Err(err(line, format!("unknown record '{tag}'"))),
        }
    }

    spec.mat_a = SparseMatrix::from_triplets(m, p, &a_triplets);
    spec.mat_b = SparseMatrix::from_triplets(n, p, &b_triplets);
    Ok(spec)
}

fn push_value(out: &mut String, tag: &str, idx: usize, value: f64) {
    use fmt::Write;
    let _ = writeln!(out, "{tag} {idx} {value}");
}

/// Serializes a spec, omitting default records (zero vector entries,
/// infinite bounds). `parse_spec(&write_spec(s))` reproduces `s` exactly:
/// the `{}` float formatting is shortest-round-trip.
pub fn write_spec(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    out.push_str("cwm 1\n");
    out.push_str(&format!("dims {} {} {}\n", spec.m, spec.n, spec.p));
    for (tag, vals) in [("a", &spec.a), ("w", &spec.w)] {
        for (i, &val) in vals.iter().enumerate() {
            if val != 0.0 {
                push_value(&mut out, tag, i, val);
            }
        }
    }
    for (tag, vals) in [("philo", &spec.phi_lo), ("phihi", &spec.phi_hi)] {
        for (i, &val) in vals.iter().enumerate() {
            if val.is_finite() {
                push_value(&mut out, tag, i, val);
            }
        }
    }
    for (i, &val) in spec.b.iter().enumerate() {
        if val != 0.0 {
            push_value(&mut out, "b", i, val);
        }
    }
    for (tag, vals) in [("lamlo", &spec.lam_lo), ("lamhi", &spec.lam_hi)] {
        for (i, &val) in vals.iter().enumerate() {
            if val.is_finite() {
                push_value(&mut out, tag, i, val);
            }
        }
    }
    for (j, &val) in spec.v.iter().enumerate() {
        if val != 0.0 {
            push_value(&mut out, "v", j, val);
        }
    }
    for (tag, mat) in [("A", &spec.mat_a), ("B", &spec.mat_b)] {
        for (i, j, val) in mat.triplets() {
            use fmt::Write;
            let _ = writeln!(out, "{tag} {i} {j} {val}");
        }
    }
    out
}

/// Certificate output: header `cwmcert 1`, a `dims` record, then every
/// component written densely (zeros included), one entry per line.
pub fn write_certificate(cert: &DualCertificate, m: usize, n: usize, p: usize) -> String {
    let mut out = String::new();
    out.push_str("cwmcert 1\n");
    out.push_str(&format!("dims {m} {n} {p}\n"));
    let sections: [(&str, &Vec<f64>); 8] = [
        ("x", &cert.x),
        ("s", &cert.s),
        ("y", &cert.y),
        ("z", &cert.z),
        ("q", &cert.q),
        ("r", &cert.r),
        ("alpha", &cert.alpha),
        ("beta", &cert.beta),
    ];
    for (tag, vals) in sections {
        for (i, &val) in vals.iter().enumerate() {
            push_value(&mut out, tag, i, val);
        }
    }
    out
}
