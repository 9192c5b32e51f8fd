//! Graphs, model parameters, configurations, weight functions and the
//! parameter transforms that connect the Ising, random-cluster and
//! generalized subgraph-world models.

use crate::error::{domain, invalid, Result};
use std::ops::Mul;

/// Undirected multigraph on vertices `0..n` with dense edge ids `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    /// Parallel edges are kept; self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut incident = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(invalid(format!("edge {e} = ({u}, {v}) has an endpoint outside 0..{n}")));
            }
            if u == v {
                return Err(invalid(format!("edge {e} is a self-loop at vertex {u}")));
            }
            incident[u].push(e);
            incident[v].push(e);
        }
        Ok(Graph { n, edges, incident })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Ids of the edges incident to `v`, ascending.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Component label per vertex for the spanning subgraph with edge set `s`.
    pub fn components(&self, s: &Subset) -> Components {
        let mut uf = UnionFind::new(self.n);
        for e in s.ids() {
            let (u, v) = self.edges[e];
            uf.union(u, v);
        }
        uf.into_components()
    }
}

/// Vertex partition into connected components, labelled `0..count` in order
/// of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub label: Vec<usize>,
    pub count: usize,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub(crate) fn into_components(mut self) -> Components {
        let n = self.parent.len();
        let mut relabel = vec![usize::MAX; n];
        let mut label = vec![0; n];
        let mut count = 0;
        for v in 0..n {
            let r = self.find(v);
            if relabel[r] == usize::MAX {
                relabel[r] = count;
                count += 1;
            }
            label[v] = relabel[r];
        }
        Components { label, count }
    }
}

/// Subset of a fixed ground set `0..size`: an edge configuration `S ⊆ E` or
/// a vertex configuration `S ⊆ V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    members: Vec<bool>,
}

pub type EdgeConfig = Subset;
pub type VertexConfig = Subset;

impl Subset {
    pub fn empty(size: usize) -> Self {
        Subset { members: vec![false; size] }
    }

    pub fn full(size: usize) -> Self {
        Subset { members: vec![true; size] }
    }

    pub fn from_ids(size: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(size);
        for i in ids {
            if i >= size {
                return Err(invalid(format!("id {i} outside ground set 0..{size}")));
            }
            s.members[i] = true;
        }
        Ok(s)
    }

    /// Bit `i` of `mask` gives membership of `i`.
    pub fn from_mask(size: usize, mask: u64) -> Self {
        assert!(size <= 64, "mask form needs a ground set of at most 64 elements");
        Subset { members: (0..size).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn from_bools(members: Vec<bool>) -> Self {
        Subset { members }
    }

    pub fn mask(&self) -> u64 {
        assert!(self.members.len() <= 64, "mask form needs a ground set of at most 64 elements");
        self.members.iter().rev().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    pub fn ground_size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn set(&mut self, i: usize, present: bool) {
        self.members[i] = present;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.members
    }

    pub fn complement(&self) -> Self {
        Subset { members: self.members.iter().map(|&b| !b).collect() }
    }

    /// `|self ⊕ other|`.
    pub fn symmetric_difference_len(&self, other: &Subset) -> usize {
        assert_eq!(self.ground_size(), other.ground_size());
        self.members.iter().zip(&other.members).filter(|(a, b)| a != b).count()
    }
}

/// Nonnegative number carried as an explicit zero flag plus a natural log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogWeight {
    zero: bool,
    ln: f64,
}

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight { zero: true, ln: 0.0 };
    pub const ONE: LogWeight = LogWeight { zero: false, ln: 0.0 };

    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogWeight { zero: false, ln }
        }
    }

    pub fn from_value(x: f64) -> Self {
        debug_assert!(x >= 0.0, "weights are nonnegative");
        if x == 0.0 {
            Self::ZERO
        } else {
            LogWeight { zero: false, ln: x.ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.zero {
            f64::NEG_INFINITY
        } else {
            self.ln
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }
}

impl Mul for LogWeight {
    type Output = LogWeight;

    fn mul(self, rhs: LogWeight) -> LogWeight {
        if self.zero || rhs.zero {
            LogWeight::ZERO
        } else {
            LogWeight { zero: false, ln: self.ln + rhs.ln }
        }
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(invalid(format!("{what} has length {got}, expected {want}")))
    }
}

/// Ferromagnetic Ising parameters. Edge activities are stored as `beta - 1`
/// so that activities just above 1 keep full precision.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingParams {
    beta_minus_one: Vec<f64>,
    lambda: Vec<f64>,
}

impl IsingParams {
    pub fn new(beta: &[f64], lambda: Vec<f64>) -> Result<Self> {
        Self::from_beta_minus_one(beta.iter().map(|b| b - 1.0).collect(), lambda)
    }

    /// Fields must lie entirely in `[0, 1]` or entirely above 1.
    pub fn from_beta_minus_one(beta_minus_one: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        for (e, &b) in beta_minus_one.iter().enumerate() {
            if !(b.is_finite() && b > 0.0) {
                return Err(domain(format!("edge activity of edge {e} must exceed 1, got {}", 1.0 + b)));
            }
        }
        for (v, &l) in lambda.iter().enumerate() {
            if !(l.is_finite() && l >= 0.0) {
                return Err(domain(format!("field of vertex {v} must be finite and nonnegative, got {l}")));
            }
        }
        let low = lambda.iter().all(|&l| l <= 1.0);
        let high = lambda.iter().all(|&l| l > 1.0);
        if !(low || high) {
            return Err(crate::Error::Unsupported(
                "fields must lie entirely in [0, 1] or entirely above 1".into(),
            ));
        }
        Ok(IsingParams { beta_minus_one, lambda })
    }

    pub fn for_graph(self, g: &Graph) -> Result<Self> {
        check_len("edge activity vector", self.beta_minus_one.len(), g.m())?;
        check_len("field vector", self.lambda.len(), g.n())?;
        Ok(self)
    }

    pub fn beta(&self) -> Vec<f64> {
        self.beta_minus_one.iter().map(|b| 1.0 + b).collect()
    }

    pub fn beta_minus_one(&self) -> &[f64] {
        &self.beta_minus_one
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Whether every field exceeds 1.
    pub fn high_field(&self) -> bool {
        !self.lambda.is_empty() && self.lambda.iter().all(|&l| l > 1.0)
    }

    /// `p_e = (beta_e - 1) / beta_e`.
    pub fn rc_edge_probabilities(&self) -> Vec<f64> {
        self.beta_minus_one.iter().map(|&b| b / (1.0 + b)).collect()
    }

    /// `sum_e ln beta_e`.
    pub fn ln_beta_product(&self) -> f64 {
        self.beta_minus_one.iter().map(|b| b.ln_1p()).sum()
    }
}

/// Random-cluster parameters. `lambda_v = 1` is admitted for the exact
/// oracles; samplers enforce their own stricter contract.
#[derive(Clone, Debug, PartialEq)]
pub struct RcParams {
    p: Vec<f64>,
    lambda: Vec<f64>,
}

impl RcParams {
    pub fn new(p: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        for (e, &x) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(domain(format!("edge probability of edge {e} must lie in [0, 1], got {x}")));
            }
        }
        for (v, &l) in lambda.iter().enumerate() {
            if !(0.0..=1.0).contains(&l) {
                return Err(domain(format!("field of vertex {v} must lie in [0, 1], got {l}")));
            }
        }
        Ok(RcParams { p, lambda })
    }

    pub fn for_graph(self, g: &Graph) -> Result<Self> {
        check_len("edge probability vector", self.p.len(), g.m())?;
        check_len("field vector", self.lambda.len(), g.n())?;
        Ok(self)
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn p_min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().copied().fold(0.0, f64::max)
    }

    /// Parameters of the subgraph-world model tied to this random-cluster
    /// model: edge parameter `p/2`, `eta = (1-lambda)/(1+lambda)`, all-ones parity.
    pub fn subgraph_world(&self) -> GswParams {
        GswParams {
            p: self.p.iter().map(|x| x / 2.0).collect(),
            eta: self.lambda.iter().map(|&l| eta_of(l)).collect(),
            sigma: vec![true; self.lambda.len()],
        }
    }
}

/// Generalized subgraph-world parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct GswParams {
    p: Vec<f64>,
    eta: Vec<f64>,
    sigma: Vec<bool>,
}

impl GswParams {
    pub fn new(p: Vec<f64>, eta: Vec<f64>, sigma: Vec<bool>) -> Result<Self> {
        for (e, &x) in p.iter().enumerate() {
            if !(0.0..=0.5).contains(&x) {
                return Err(domain(format!("edge parameter of edge {e} must lie in [0, 1/2], got {x}")));
            }
        }
        for (v, &h) in eta.iter().enumerate() {
            if !(0.0..=1.0).contains(&h) {
                return Err(domain(format!("eta of vertex {v} must lie in [0, 1], got {h}")));
            }
        }
        check_len("parity vector", sigma.len(), eta.len())?;
        Ok(GswParams { p, eta, sigma })
    }

    pub fn for_graph(self, g: &Graph) -> Result<Self> {
        check_len("edge parameter vector", self.p.len(), g.m())?;
        check_len("eta vector", self.eta.len(), g.n())?;
        Ok(self)
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn sigma(&self) -> &[bool] {
        &self.sigma
    }

    pub fn eta_min(&self) -> f64 {
        self.eta.iter().copied().fold(1.0, f64::min)
    }

    pub fn with_sigma(&self, sigma: Vec<bool>) -> Result<Self> {
        Self::new(self.p.clone(), self.eta.clone(), sigma)
    }

    /// Same parameters with the parity of `u` flipped.
    pub fn flipped(&self, u: usize) -> Self {
        let mut out = self.clone();
        out.sigma[u] = !out.sigma[u];
        out
    }
}

fn check_config(s: &Subset, size: usize, what: &str) -> Result<()> {
    check_len(what, s.ground_size(), size)
}

fn ln_bernoulli(p: f64, present: bool) -> LogWeight {
    if present {
        LogWeight::from_value(p)
    } else if p >= 1.0 {
        LogWeight::ZERO
    } else {
        LogWeight::from_ln((-p).ln_1p())
    }
}

/// `prod_{e in m(S)} beta_e prod_{v in S} lambda_v`, where `m(S)` holds the
/// edges with both or neither endpoint in `S`.
pub fn ising_weight(g: &Graph, params: &IsingParams, s: &VertexConfig) -> Result<LogWeight> {
    check_len("edge activity vector", params.beta_minus_one.len(), g.m())?;
    check_len("field vector", params.lambda.len(), g.n())?;
    check_config(s, g.n(), "vertex configuration")?;
    let mut w = LogWeight::ONE;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if s.contains(u) == s.contains(v) {
            w = w * LogWeight::from_ln(params.beta_minus_one[e].ln_1p());
        }
    }
    for v in s.ids() {
        w = w * LogWeight::from_value(params.lambda[v]);
    }
    Ok(w)
}

/// `p^S (1-p)^{E∖S} prod_{C in kappa(V,S)} (1 + lambda^C)`.
pub fn rc_weight(g: &Graph, params: &RcParams, s: &EdgeConfig) -> Result<LogWeight> {
    check_len("edge probability vector", params.p.len(), g.m())?;
    check_len("field vector", params.lambda.len(), g.n())?;
    check_config(s, g.m(), "edge configuration")?;
    let mut w = LogWeight::ONE;
    for (e, &p) in params.p.iter().enumerate() {
        w = w * ln_bernoulli(p, s.contains(e));
    }
    if w.is_zero() {
        return Ok(w);
    }
    let comps = g.components(s);
    Ok(w * LogWeight::from_ln(ln_cluster_factors(&comps, &params.lambda)))
}

/// `sum_C ln(1 + lambda^C)` over the components of a partition.
pub(crate) fn ln_cluster_factors(comps: &Components, lambda: &[f64]) -> f64 {
    let mut zero = vec![false; comps.count];
    let mut ln = vec![0.0f64; comps.count];
    for (v, &c) in comps.label.iter().enumerate() {
        if lambda[v] == 0.0 {
            zero[c] = true;
        } else {
            ln[c] += lambda[v].ln();
        }
    }
    zero.iter().zip(&ln).filter(|(z, _)| !**z).map(|(_, &l)| ln_one_plus_exp(l)).sum()
}

/// `ln(1 + e^x)` without overflow.
pub fn ln_one_plus_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `p^S (1-p)^{E∖S} prod_{v : |S ∩ E_v| ≡ sigma_v} eta_v`.
pub fn gsw_weight(g: &Graph, params: &GswParams, s: &EdgeConfig) -> Result<LogWeight> {
    check_len("edge parameter vector", params.p.len(), g.m())?;
    check_len("eta vector", params.eta.len(), g.n())?;
    check_config(s, g.m(), "edge configuration")?;
    let mut w = LogWeight::ONE;
    let mut parity = vec![false; g.n()];
    for (e, &p) in params.p.iter().enumerate() {
        let present = s.contains(e);
        w = w * ln_bernoulli(p, present);
        if present {
            let (u, v) = g.endpoints(e);
            parity[u] ^= true;
            parity[v] ^= true;
        }
    }
    for v in 0..g.n() {
        if parity[v] == params.sigma[v] {
            w = w * LogWeight::from_value(params.eta[v]);
        }
    }
    Ok(w)
}

/// `p = 1 - 1/beta`, evaluated as `(beta - 1)/beta`.
pub fn beta_to_p(beta: &[f64]) -> Result<Vec<f64>> {
    beta.iter()
        .map(|&b| {
            if b.is_finite() && b > 1.0 {
                Ok((b - 1.0) / b)
            } else {
                Err(domain(format!("edge activity must exceed 1, got {b}")))
            }
        })
        .collect()
}

fn eta_of(l: f64) -> f64 {
    (1.0 - l) / (1.0 + l)
}

/// `eta = (1 - lambda)/(1 + lambda)`.
pub fn lambda_to_eta(lambda: &[f64]) -> Result<Vec<f64>> {
    lambda
        .iter()
        .map(|&l| {
            if (0.0..=1.0).contains(&l) {
                Ok(eta_of(l))
            } else {
                Err(domain(format!("field must lie in [0, 1], got {l}")))
            }
        })
        .collect()
}

/// Edge probability of the field-dynamics active instance,
/// `p* = p / (theta (1 - p) + p)`. `theta = 1` is the identity.
pub fn p_star_scalar(p: f64, theta: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p / (theta * (1.0 - p) + p)
    }
}

pub fn p_star(p: &[f64], theta: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(domain(format!("theta must lie in (0, 1], got {theta}")));
    }
    p.iter()
        .map(|&x| {
            if (0.0..=1.0).contains(&x) {
                Ok(p_star_scalar(x, theta))
            } else {
                Err(domain(format!("edge probability must lie in [0, 1], got {x}")))
            }
        })
        .collect()
}

/// `q = p / (2 - p)`.
pub fn p_to_q(p: &[f64]) -> Result<Vec<f64>> {
    p.iter()
        .map(|&x| {
            if (0.0..=1.0).contains(&x) {
                Ok(x / (2.0 - x))
            } else {
                Err(domain(format!("edge probability must lie in [0, 1], got {x}")))
            }
        })
        .collect()
}
