//! Desk-scale coupling constructions for the generalized subgraph-world
//! model and their lift to the random-cluster model.
//!
//! Every partition sum is computed by enumerating subsets of the working
//! edge set, so instances are capped at [`DESK_EDGE_CAP`] edges and 64
//! vertices. Edge and vertex sets inside a context are bitmasks.

use crate::error::{invalid, Error, Result};
use crate::exact::{enumerate_gsw, enumerate_rc};
use crate::model::{p_to_q, EdgeConfig, Graph, GswParams, RcParams};
use rand::Rng;
use std::collections::BTreeMap;

pub const DESK_EDGE_CAP: usize = 20;

/// Largest edge count for the convolution check, whose cost is `3^m`.
pub const CONVOLUTION_CAP: usize = 16;

/// `E|X ⊕ Y| ≤ 1/(4 eta_min^2)` for the single-vertex coupling.
pub fn vertex_bound(eta_min: f64) -> f64 {
    0.25 / (eta_min * eta_min)
}

/// `E|X ⊕ Y| ≤ 1/(2 eta_min^2)` for the edge coupling, off the pivot edge.
pub fn edge_bound(eta_min: f64) -> f64 {
    0.5 / (eta_min * eta_min)
}

/// `2 (1 - lambda_max)^{-2}` for the lifted random-cluster coupling.
pub fn lift_bound(lambda_max: f64) -> f64 {
    2.0 / ((1.0 - lambda_max) * (1.0 - lambda_max))
}

/// `Pr[|U| ≥ k] ≤ ((1 - eta_min)/(1 + eta_min))^{k-1}`.
pub fn visited_tail_bound(eta_min: f64, k: usize) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    ((1.0 - eta_min) / (1.0 + eta_min)).powi(k as i32 - 1)
}

/// `q0 = eta R/(eta R + 1)` and `q1 = R/(R + eta)` for `R = even/odd`, in a
/// form that stays finite when one of the masses vanishes.
pub fn parity_thresholds(even: f64, odd: f64, eta: f64) -> (f64, f64) {
    (eta * even / (eta * even + odd), even / (even + eta * odd))
}

/// `t_e = q_e nu(ē) / (q_e nu(ē) + nu(e))`.
pub fn lift_mixing_weight(q_e: f64, nu_absent: f64, nu_present: f64) -> f64 {
    let a = q_e * nu_absent;
    if a + nu_present == 0.0 {
        return 0.0;
    }
    a / (a + nu_present)
}

/// State of one call of the coupling procedure: working edge set, current
/// `eta` (zero exactly on visited vertices), parity vector and visited set.
#[derive(Clone, Debug)]
pub struct CoupleContext {
    ends: Vec<(usize, usize)>,
    /// Edge mask incident to each vertex.
    incident: Vec<u64>,
    p: Vec<f64>,
    eta: Vec<f64>,
    sigma: u64,
    alive: u64,
    visited: u64,
}

/// Result of one run: edge masks of both sides, visited count, and the
/// largest deviation seen in the parity-threshold identity when checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupleOutcome {
    pub x: u64,
    pub y: u64,
    pub visited: u32,
    pub identity_err: f64,
}

impl CoupleContext {
    /// Fresh context with nothing visited; every `eta_v` must be positive.
    pub fn new(g: &Graph, params: &GswParams) -> Result<Self> {
        let params = params.clone().for_graph(g)?;
        if g.m() > DESK_EDGE_CAP {
            return Err(Error::CapExceeded { size: g.m(), cap: DESK_EDGE_CAP });
        }
        if g.n() > 64 {
            return Err(invalid("coupling contexts hold at most 64 vertices"));
        }
        if let Some(v) = params.eta().iter().position(|&h| h <= 0.0) {
            return Err(crate::error::domain(format!("eta of unvisited vertex {v} must be positive")));
        }
        let mut incident = vec![0u64; g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            incident[u] |= 1 << e;
            incident[v] |= 1 << e;
        }
        let sigma = params.sigma().iter().enumerate().fold(0u64, |acc, (v, &s)| acc | (s as u64) << v);
        let ctx = CoupleContext {
            ends: g.edges().to_vec(),
            incident,
            p: params.p().to_vec(),
            eta: params.eta().to_vec(),
            sigma,
            alive: if g.m() == 0 { 0 } else { u64::MAX >> (64 - g.m()) },
            visited: 0,
        };
        if ctx.total(ctx.sigma, &ctx.eta) <= 0.0 {
            return Err(Error::Degenerate("subgraph-world partition function is zero".into()));
        }
        Ok(ctx)
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn sigma(&self) -> Vec<bool> {
        (0..self.eta.len()).map(|v| self.sigma >> v & 1 == 1).collect()
    }

    pub fn alive_edges(&self) -> Vec<usize> {
        mask_ids(self.alive)
    }

    pub fn visited(&self) -> Vec<usize> {
        mask_ids(self.visited)
    }

    /// Drops edge `e` from the working graph.
    pub fn remove_edge(&mut self, e: usize) {
        self.alive &= !(1 << e);
    }

    pub fn flip(&mut self, v: usize) {
        self.sigma ^= 1 << v;
    }

    fn vertex_mask(&self) -> u64 {
        u64::MAX >> (64 - self.eta.len().max(1))
    }

    fn weight(&self, s: u64, sigma: u64, eta: &[f64]) -> f64 {
        let mut w = 1.0;
        let mut parity = 0u64;
        let mut a = self.alive;
        while a != 0 {
            let e = a.trailing_zeros() as usize;
            a &= a - 1;
            if s >> e & 1 == 1 {
                w *= self.p[e];
                let (u, v) = self.ends[e];
                parity ^= 1 << u ^ 1 << v;
            } else {
                w *= 1.0 - self.p[e];
            }
        }
        let mut same = !(parity ^ sigma) & self.vertex_mask();
        while same != 0 {
            let v = same.trailing_zeros() as usize;
            same &= same - 1;
            w *= eta[v];
        }
        w
    }

    fn for_each(&self, sigma: u64, eta: &[f64], mut f: impl FnMut(u64, f64)) {
        let mut s = self.alive;
        loop {
            f(s, self.weight(s, sigma, eta));
            if s == 0 {
                break;
            }
            s = (s - 1) & self.alive;
        }
    }

    fn total(&self, sigma: u64, eta: &[f64]) -> f64 {
        let mut z = 0.0;
        self.for_each(sigma, eta, |_, w| z += w);
        z
    }

    /// Masses of configurations with even and odd degree at `u`.
    fn parity_masses(&self, u: usize, sigma: u64, eta: &[f64]) -> (f64, f64) {
        let (mut even, mut odd) = (0.0, 0.0);
        let inc = self.incident[u];
        self.for_each(sigma, eta, |s, w| {
            if (s & inc).count_ones() % 2 == 0 {
                even += w;
            } else {
                odd += w;
            }
        });
        (even, odd)
    }

    /// Normalized law over submasks of the working edge set.
    fn law(&self, sigma: u64) -> Result<Vec<(u64, f64)>> {
        let mut out = Vec::new();
        let mut z = 0.0;
        self.for_each(sigma, &self.eta, |s, w| {
            if w > 0.0 {
                z += w;
                out.push((s, w));
            }
        });
        if z <= 0.0 {
            return Err(Error::Degenerate("subgraph-world partition function is zero".into()));
        }
        for entry in &mut out {
            entry.1 /= z;
        }
        Ok(out)
    }

    fn sample<R: Rng + ?Sized>(&self, sigma: u64, rng: &mut R) -> Result<u64> {
        let law = self.law(sigma)?;
        let mut r = rng.random::<f64>();
        for &(s, q) in &law {
            if r < q {
                return Ok(s);
            }
            r -= q;
        }
        Ok(law.last().expect("laws are nonempty").0)
    }

    /// Probability that `e` is present under parity vector `sigma`.
    fn edge_marginal(&self, e: usize, sigma: u64) -> Result<f64> {
        let (mut z, mut with) = (0.0, 0.0);
        self.for_each(sigma, &self.eta, |s, w| {
            z += w;
            if s >> e & 1 == 1 {
                with += w;
            }
        });
        if z <= 0.0 {
            return Err(Error::Degenerate("subgraph-world partition function is zero".into()));
        }
        Ok(with / z)
    }

    fn pivot_edge(&self, u: usize) -> Result<(usize, usize)> {
        let avail = self.incident[u] & self.alive;
        if avail == 0 {
            return Err(Error::Degenerate(format!(
                "vertex {u} has no remaining incident edge while its parities still differ"
            )));
        }
        let e = avail.trailing_zeros() as usize;
        let (a, b) = self.ends[e];
        Ok((e, if a == u { b } else { a }))
    }

    /// Thresholds at a first visit of `u`, with `eta_u` treated as 1, and
    /// the deviation of the identity `mu_{sigma[u→c]}(even at u) = q_c`.
    fn thresholds(&self, u: usize, check: bool) -> (f64, f64, f64) {
        let mut eta = self.eta.clone();
        eta[u] = 1.0;
        let (even, odd) = self.parity_masses(u, self.sigma, &eta);
        let (q0, q1) = parity_thresholds(even, odd, self.eta[u]);
        let mut err: f64 = 0.0;
        if check {
            for (c, q) in [(0u64, q0), (1u64, q1)] {
                let sigma = self.sigma & !(1 << u) | c << u;
                let (a, b) = self.parity_masses(u, sigma, &self.eta);
                err = err.max((a / (a + b) - q).abs());
            }
        }
        (q0, q1, err)
    }

    /// Runs the coupling from vertex `u`. `X` follows the context's law and
    /// `Y` the law with the parity of `u` flipped.
    pub fn couple<R: Rng + ?Sized>(mut self, mut u: usize, check: bool, rng: &mut R) -> Result<CoupleOutcome> {
        if u >= self.eta.len() {
            return Err(invalid(format!("vertex {u} is out of range")));
        }
        let (mut x, mut y) = (0u64, 0u64);
        let mut identity_err: f64 = 0.0;
        loop {
            if self.visited >> u & 1 == 0 {
                self.visited |= 1 << u;
                let (q0, q1, err) = self.thresholds(u, check);
                identity_err = identity_err.max(err);
                let r = rng.random::<f64>();
                self.eta[u] = 0.0;
                let fixed = if r >= q1 {
                    Some(0u64)
                } else if r <= q0 {
                    Some(1u64)
                } else {
                    None
                };
                if let Some(c) = fixed {
                    let s = self.sample(self.sigma & !(1 << u) | c << u, rng)?;
                    return Ok(CoupleOutcome {
                        x: x | s,
                        y: y | s,
                        visited: self.visited.count_ones(),
                        identity_err,
                    });
                }
            }
            let (e, v) = self.pivot_edge(u)?;
            let nu = self.edge_marginal(e, self.sigma)?;
            let pi = self.edge_marginal(e, self.sigma ^ 1 << u)?;
            let r = rng.random::<f64>();
            let (x1, y1) = (r < nu, r < pi);
            x |= (x1 as u64) << e;
            y |= (y1 as u64) << e;
            if x1 {
                self.sigma ^= 1 << u ^ 1 << v;
            }
            self.alive &= !(1 << e);
            if x1 != y1 {
                u = v;
            }
        }
    }

    /// Exact joint law of [`couple`](Self::couple) from `u`, keyed by
    /// `(x, y)` masks. The cost is exponential in the edge count.
    pub fn joint_law(&self, u: usize) -> Result<BTreeMap<(u64, u64), f64>> {
        if u >= self.eta.len() {
            return Err(invalid(format!("vertex {u} is out of range")));
        }
        let mut out = BTreeMap::new();
        self.clone().joint_into(u, 1.0, 0, 0, &mut out)?;
        Ok(out)
    }

    fn joint_into(mut self, u: usize, mut w: f64, x: u64, y: u64, out: &mut BTreeMap<(u64, u64), f64>) -> Result<()> {
        if self.visited >> u & 1 == 0 {
            self.visited |= 1 << u;
            let (q0, q1, _) = self.thresholds(u, false);
            self.eta[u] = 0.0;
            for (c, mass) in [(0u64, 1.0 - q1), (1u64, q0)] {
                if mass > 0.0 {
                    for (s, q) in self.law(self.sigma & !(1 << u) | c << u)? {
                        *out.entry((x | s, y | s)).or_insert(0.0) += w * mass * q;
                    }
                }
            }
            w *= q1 - q0;
            if w <= 0.0 {
                return Ok(());
            }
        }
        let (e, v) = self.pivot_edge(u)?;
        let nu = self.edge_marginal(e, self.sigma)?;
        let pi = self.edge_marginal(e, self.sigma ^ 1 << u)?;
        let branches = [
            (true, true, nu.min(pi)),
            (true, false, nu - pi),
            (false, true, pi - nu),
            (false, false, 1.0 - nu.max(pi)),
        ];
        for (x1, y1, mass) in branches {
            if mass <= 0.0 {
                continue;
            }
            let mut next = self.clone();
            if x1 {
                next.sigma ^= 1 << u ^ 1 << v;
            }
            next.alive &= !(1 << e);
            next.joint_into(
                if x1 == y1 { u } else { v },
                w * mass,
                x | (x1 as u64) << e,
                y | (y1 as u64) << e,
                out,
            )?;
        }
        Ok(())
    }
}

fn mask_ids(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}

/// A coupled pair on a common edge ground set. `discrepancy` is the
/// coupler's counted distance (see each coupler).
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSample {
    pub x: EdgeConfig,
    pub y: EdgeConfig,
    pub discrepancy: usize,
    /// Vertices visited by the first coupling procedure, if one ran.
    pub visited: usize,
}

pub trait PairCoupler {
    fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CouplingSample>;
}

/// One run of the vertex coupling on a fresh context.
pub fn couple_gsw<R: Rng + ?Sized>(ctx: CoupleContext, u: usize, rng: &mut R) -> Result<CouplingSample> {
    let m = ctx.edge_count();
    let o = ctx.couple(u, false, rng)?;
    Ok(CouplingSample {
        x: EdgeConfig::from_mask(m, o.x),
        y: EdgeConfig::from_mask(m, o.y),
        discrepancy: (o.x ^ o.y).count_ones() as usize,
        visited: o.visited as usize,
    })
}

/// Couples `mu_sigma` with `mu_{sigma ⊕ 1_u}`; the full symmetric
/// difference is counted.
#[derive(Clone, Debug)]
pub struct VertexCoupler {
    ctx: CoupleContext,
    u: usize,
}

impl VertexCoupler {
    pub fn new(g: &Graph, params: &GswParams, u: usize) -> Result<Self> {
        if u >= g.n() {
            return Err(invalid(format!("vertex {u} is out of range")));
        }
        Ok(VertexCoupler { ctx: CoupleContext::new(g, params)?, u })
    }

    pub fn context(&self) -> &CoupleContext {
        &self.ctx
    }

    /// Runs once, also returning the largest deviation in the threshold
    /// identity over all first visits.
    pub fn sample_checked<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(CouplingSample, f64)> {
        let m = self.ctx.edge_count();
        let o = self.ctx.clone().couple(self.u, true, rng)?;
        let sample = CouplingSample {
            x: EdgeConfig::from_mask(m, o.x),
            y: EdgeConfig::from_mask(m, o.y),
            discrepancy: (o.x ^ o.y).count_ones() as usize,
            visited: o.visited as usize,
        };
        Ok((sample, o.identity_err))
    }
}

impl PairCoupler for VertexCoupler {
    fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CouplingSample> {
        couple_gsw(self.ctx.clone(), self.u, rng)
    }
}

/// Couples `nu(·|ē)` with `nu(·|e)` by gluing two vertex couplings through
/// the intermediate law on `E ∖ {e}` with the parity of `u` flipped: `(X, Z)`
/// is drawn by the procedure at `u`, then `Y` from the exact conditional of
/// the coupling at `v` given its first coordinate `Z`. `Y` contains `e`;
/// the discrepancy is counted on `E ∖ {e}`.
#[derive(Clone, Debug)]
pub struct EdgeCoupler {
    base: CoupleContext,
    e: usize,
    u: usize,
    /// For each `Z`, the conditional law of `Y` as `(mask, cumulative)`.
    second: BTreeMap<u64, Vec<(u64, f64)>>,
    nu_present: f64,
}

impl EdgeCoupler {
    pub fn new(g: &Graph, params: &GswParams, e: usize) -> Result<Self> {
        if e >= g.m() {
            return Err(invalid(format!("edge {e} is out of range")));
        }
        let ctx = CoupleContext::new(g, params)?;
        let nu_present = ctx.edge_marginal(e, ctx.sigma)?;
        if !(nu_present > 0.0 && nu_present < 1.0) {
            return Err(Error::Degenerate(format!("edge {e} has marginal {nu_present}; both conditionals must exist")));
        }
        let (u, v) = g.endpoints(e);
        let mut base = ctx;
        base.remove_edge(e);
        let mut mid = base.clone();
        mid.flip(u);
        let mut second: BTreeMap<u64, Vec<(u64, f64)>> = BTreeMap::new();
        for ((z, y), q) in mid.joint_law(v)? {
            second.entry(z).or_default().push((y, q));
        }
        for row in second.values_mut() {
            let total: f64 = row.iter().map(|r| r.1).sum();
            let mut acc = 0.0;
            for r in row.iter_mut() {
                acc += r.1 / total;
                r.1 = acc;
            }
        }
        Ok(EdgeCoupler { base, e, u, second, nu_present })
    }

    /// `nu(e)` under the full instance.
    pub fn nu_present(&self) -> f64 {
        self.nu_present
    }

    pub fn pivot(&self) -> usize {
        self.e
    }
}

impl PairCoupler for EdgeCoupler {
    fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CouplingSample> {
        let m = self.base.edge_count();
        let first = self.base.clone().couple(self.u, false, rng)?;
        let row = self
            .second
            .get(&first.y)
            .ok_or_else(|| Error::Degenerate("intermediate configuration outside the second coupling's support".into()))?;
        let r = rng.random::<f64>();
        let idx = row.partition_point(|&(_, c)| c <= r).min(row.len() - 1);
        let y = row[idx].0;
        Ok(CouplingSample {
            x: EdgeConfig::from_mask(m, first.x),
            y: EdgeConfig::from_mask(m, y | 1 << self.e),
            discrepancy: (first.x ^ y).count_ones() as usize,
            visited: first.visited as usize,
        })
    }
}

pub fn couple_gsw_edge<R: Rng + ?Sized>(g: &Graph, params: &GswParams, e: usize, rng: &mut R) -> Result<CouplingSample> {
    EdgeCoupler::new(g, params, e)?.sample_pair(rng)
}

/// Couples `mu(·|ē)` with `mu(·|e)` for the random-cluster law by lifting
/// an edge coupling of the subgraph-world law with parameters `p/2`,
/// `eta = (1-lambda)/(1+lambda)`, `sigma = 1`. The full symmetric difference,
/// including `e`, is counted.
#[derive(Clone, Debug)]
pub struct LiftCoupler {
    inner: EdgeCoupler,
    q: Vec<f64>,
    t_e: f64,
}

impl LiftCoupler {
    pub fn new(g: &Graph, rc: &RcParams, e: usize) -> Result<Self> {
        let rc = rc.clone().for_graph(g)?;
        if rc.lambda_max() >= 1.0 {
            return Err(crate::error::domain("the lift needs every field below 1"));
        }
        let inner = EdgeCoupler::new(g, &rc.subgraph_world(), e)?;
        let q = p_to_q(rc.p())?;
        if q[e] >= 1.0 {
            return Err(Error::Degenerate(format!("edge {e} has p = 1, so mu(·|ē) does not exist")));
        }
        let nu_present = inner.nu_present();
        let t_e = lift_mixing_weight(q[e], 1.0 - nu_present, nu_present);
        Ok(LiftCoupler { inner, q, t_e })
    }

    pub fn t_e(&self) -> f64 {
        self.t_e
    }
}

impl PairCoupler for LiftCoupler {
    fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CouplingSample> {
        let m = self.q.len();
        let e = self.inner.pivot();
        let pair = self.inner.sample_pair(rng)?;
        let z = self
            .q
            .iter()
            .enumerate()
            .fold(0u64, |acc, (f, &q)| acc | ((rng.random::<f64>() < q) as u64) << f);
        let base = pair.x.mask() | z;
        let y0 = base & !(1 << e);
        let y1 = if rng.random::<f64>() < self.t_e { base | 1 << e } else { pair.y.mask() | z };
        Ok(CouplingSample {
            x: EdgeConfig::from_mask(m, y0),
            y: EdgeConfig::from_mask(m, y1),
            discrepancy: (y0 ^ y1).count_ones() as usize,
            visited: pair.visited,
        })
    }
}

pub fn lift_coupling_rc<R: Rng + ?Sized>(g: &Graph, rc: &RcParams, e: usize, rng: &mut R) -> Result<CouplingSample> {
    LiftCoupler::new(g, rc, e)?.sample_pair(rng)
}

/// Returns the same exact sample on both sides.
#[derive(Clone, Debug)]
pub struct IdenticalCoupler {
    sampler: crate::exact::ExactSampler,
}

impl IdenticalCoupler {
    pub fn new(dist: &crate::exact::ExactDistribution) -> Self {
        IdenticalCoupler { sampler: crate::exact::ExactSampler::new(dist) }
    }
}

impl PairCoupler for IdenticalCoupler {
    fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CouplingSample> {
        let s = self.sampler.sample(rng);
        Ok(CouplingSample { x: s.clone(), y: s, discrepancy: 0, visited: 0 })
    }
}

/// Monte Carlo mean of the counted discrepancy with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub runs: usize,
    pub mean: f64,
    pub stderr: f64,
}

pub fn estimate_coupling_independence<C: PairCoupler, R: Rng + ?Sized>(
    coupler: &C,
    runs: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if runs == 0 {
        return Err(invalid("at least one run is needed"));
    }
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..runs {
        let d = coupler.sample_pair(rng)?.discrepancy as f64;
        sum += d;
        sq += d * d;
    }
    let n = runs as f64;
    let mean = sum / n;
    let var = if runs > 1 { ((sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(Estimate { runs, mean, stderr: (var / n).sqrt() })
}

/// Largest deviation in `mu(Y) = sum_{X ⊆ Y} nu(X) q^{Y∖X} (1-q)^{E∖Y}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionReport {
    pub configurations: usize,
    pub max_abs_err: f64,
}

impl ConvolutionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_abs_err <= tol
    }
}

pub fn verify_sw_rc_convolution(g: &Graph, rc: &RcParams) -> Result<ConvolutionReport> {
    let rc = rc.clone().for_graph(g)?;
    let m = g.m();
    if m > CONVOLUTION_CAP {
        return Err(Error::CapExceeded { size: m, cap: CONVOLUTION_CAP });
    }
    let mu = enumerate_rc(g, &rc)?;
    let nu = enumerate_gsw(g, &rc.subgraph_world())?;
    let q = p_to_q(rc.p())?;
    let full = if m == 0 { 0 } else { u64::MAX >> (64 - m) };
    let mut max_abs_err: f64 = 0.0;
    for y in 0..=full {
        let outside: f64 = (0..m).filter(|f| y >> f & 1 == 0).map(|f| 1.0 - q[f]).product();
        let mut sum = 0.0;
        let mut x = y;
        loop {
            let extra: f64 = (0..m).filter(|h| (y & !x) >> h & 1 == 1).map(|h| q[h]).product();
            sum += nu.prob(x) * extra;
            if x == 0 {
                break;
            }
            x = (x - 1) & y;
        }
        max_abs_err = max_abs_err.max((mu.prob(y) - sum * outside).abs());
    }
    Ok(ConvolutionReport { configurations: 1 << m, max_abs_err })
}
