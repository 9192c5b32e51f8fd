//! Plain-text instance format.
//!
//! ```text
//! # comment
//! n m
//! u v value      (m lines; value is beta_e for Ising, p_e for random-cluster)
//! lambda_v       (n lines)
//! ```
//!
//! Everything after `#` on a line is ignored, blank lines are skipped and
//! tokens are whitespace-separated.

use crate::error::{Error, Result};
use crate::model::{Graph, IsingParams, RcParams};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    /// `beta_e` or `p_e`, depending on the model the file describes.
    pub edge_values: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl Instance {
    pub fn ising_params(&self) -> Result<IsingParams> {
        IsingParams::new(&self.edge_values, self.lambda.clone())
    }

    pub fn rc_params(&self) -> Result<RcParams> {
        RcParams::new(self.edge_values.clone(), self.lambda.clone())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    /// Next line with content, as `(1-based line number, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{token}`")))
}

fn real(line: usize, token: &str, what: &str) -> Result<f64> {
    let x: f64 = number(line, token, what)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(parse_err(line, format!("{what} must be finite, got `{token}`")))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines { inner: text.lines().enumerate() };
    let total = text.lines().count();
    let (line, head) = lines
        .next_tokens()
        .ok_or_else(|| parse_err(total.max(1), "missing header line `n m`"))?;
    if head.len() != 2 {
        return Err(parse_err(line, "header must be `n m`"));
    }
    let n: usize = number(line, head[0], "vertex count")?;
    let m: usize = number(line, head[1], "edge count")?;

    let mut edges = Vec::with_capacity(m);
    let mut edge_values = Vec::with_capacity(m);
    for e in 0..m {
        let (line, t) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(total, format!("expected {m} edge lines, found {e}")))?;
        if t.len() != 3 {
            return Err(parse_err(line, "edge line must be `u v value`"));
        }
        let u: usize = number(line, t[0], "endpoint")?;
        let v: usize = number(line, t[1], "endpoint")?;
        if u >= n || v >= n {
            return Err(parse_err(line, format!("endpoint outside 0..{n}")));
        }
        if u == v {
            return Err(parse_err(line, format!("self-loop at vertex {u}")));
        }
        edges.push((u, v));
        edge_values.push(real(line, t[2], "edge value")?);
    }

    let mut lambda = Vec::with_capacity(n);
    for v in 0..n {
        let (line, t) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(total, format!("expected {n} field lines, found {v}")))?;
        if t.len() != 1 {
            return Err(parse_err(line, "field line must hold a single number"));
        }
        let l = real(line, t[0], "field")?;
        if l < 0.0 {
            return Err(parse_err(line, format!("field must be nonnegative, got {l}")));
        }
        lambda.push(l);
    }
    if let Some((line, _)) = lines.next_tokens() {
        return Err(parse_err(line, "unexpected content after the field lines"));
    }
    let graph = Graph::new(n, edges)?;
    Ok(Instance { graph, edge_values, lambda })
}

/// Renders an instance; `comment` lines are emitted as a `#` header.
pub fn format_instance(inst: &Instance, comment: &[&str]) -> String {
    let mut out = String::new();
    for c in comment {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{} {}", inst.graph.n(), inst.graph.m());
    for (&(u, v), x) in inst.graph.edges().iter().zip(&inst.edge_values) {
        let _ = writeln!(out, "{u} {v} {x}");
    }
    for l in &inst.lambda {
        let _ = writeln!(out, "{l}");
    }
    out
}
