//! Brute-force ground truth: dense distributions over all subsets of a small
//! ground set, partition functions, the Edwards–Sokal pushforward, total
//! variation distance, influence matrices, pinning and exact sampling.

use crate::error::{invalid, Error, Result};
use crate::model::{
    ln_one_plus_exp, EdgeConfig, Graph, GswParams, IsingParams, RcParams, Subset, UnionFind,
};
use rand::Rng;

/// Largest ground set that is enumerated.
pub const ENUMERATION_CAP: usize = 24;

/// Normalized probability table indexed by subset bitmask (bit `i` set iff
/// element `i` is in the subset).
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDistribution {
    size: usize,
    probs: Vec<f64>,
    log_z: f64,
}

fn check_cap(size: usize) -> Result<()> {
    if size > ENUMERATION_CAP {
        Err(Error::CapExceeded { size, cap: ENUMERATION_CAP })
    } else {
        Ok(())
    }
}

impl ExactDistribution {
    /// Normalizes `ln w(S)` (`-inf` for zero weight) by log-sum-exp; `log_z`
    /// is the log partition function.
    pub fn from_log_weights(size: usize, log_weights: Vec<f64>) -> Result<Self> {
        check_cap(size)?;
        if log_weights.len() != 1usize << size {
            return Err(invalid(format!("expected {} weights, got {}", 1usize << size, log_weights.len())));
        }
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::Degenerate("every configuration has zero weight".into()));
        }
        let mut probs: Vec<f64> = log_weights.iter().map(|&l| (l - max).exp()).collect();
        let sum: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= sum;
        }
        Ok(ExactDistribution { size, probs, log_z: max + sum.ln() })
    }

    /// Normalizes nonnegative masses; `log_z` is `ln` of their total.
    pub fn from_masses(size: usize, mut probs: Vec<f64>) -> Result<Self> {
        check_cap(size)?;
        if probs.len() != 1usize << size {
            return Err(invalid(format!("expected {} masses, got {}", 1usize << size, probs.len())));
        }
        let sum: f64 = probs.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::Degenerate("total mass is zero".into()));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(ExactDistribution { size, probs, log_z: sum.ln() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, mask: u64) -> f64 {
        self.probs[mask as usize]
    }

    pub fn prob_of(&self, s: &Subset) -> f64 {
        self.prob(s.mask())
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// `Pr[i ∈ S]`.
    pub fn marginal(&self, i: usize) -> f64 {
        self.probs.iter().enumerate().filter(|(s, _)| s >> i & 1 == 1).map(|(_, p)| p).sum()
    }

    /// Mass of `{S : S ∩ pinned = tau ∩ pinned}`.
    pub fn event_mass(&self, pinned: u64, tau: u64) -> f64 {
        let want = tau & pinned;
        self.probs.iter().enumerate().filter(|(s, _)| *s as u64 & pinned == want).map(|(_, p)| p).sum()
    }

    /// Exact conditioning on `S ∩ pinned = tau ∩ pinned`.
    pub fn condition(&self, pinned: u64, tau: u64) -> Result<ExactDistribution> {
        let want = tau & pinned;
        let masses = self
            .probs
            .iter()
            .enumerate()
            .map(|(s, &p)| if s as u64 & pinned == want { p } else { 0.0 })
            .collect();
        let mut out = Self::from_masses(self.size, masses)?;
        out.log_z += self.log_z;
        Ok(out)
    }
}

/// Model whose distribution is enumerated.
#[derive(Clone, Copy, Debug)]
pub enum Model<'a> {
    Ising(&'a IsingParams),
    Rc(&'a RcParams),
    Gsw(&'a GswParams),
}

pub fn enumerate(model: Model<'_>, g: &Graph) -> Result<ExactDistribution> {
    match model {
        Model::Ising(p) => enumerate_ising(g, p),
        Model::Rc(p) => enumerate_rc(g, p),
        Model::Gsw(p) => enumerate_gsw(g, p),
    }
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `(ln p_e, ln(1 - p_e))` per edge.
fn ln_bernoulli_tables(p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ln_in = p.iter().map(|&x| ln_or_neg_inf(x)).collect();
    let ln_out = p.iter().map(|&x| if x < 1.0 { (-x).ln_1p() } else { f64::NEG_INFINITY }).collect();
    (ln_in, ln_out)
}

pub fn enumerate_ising(g: &Graph, params: &IsingParams) -> Result<ExactDistribution> {
    let params = params.clone().for_graph(g)?;
    check_cap(g.n())?;
    let ln_beta: Vec<f64> = params.beta_minus_one().iter().map(|b| b.ln_1p()).collect();
    let ln_lambda: Vec<f64> = params.lambda().iter().map(|&l| ln_or_neg_inf(l)).collect();
    let weights = (0..1u64 << g.n())
        .map(|s| {
            let mut w = 0.0;
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                if (s >> u & 1) == (s >> v & 1) {
                    w += ln_beta[e];
                }
            }
            for (v, l) in ln_lambda.iter().enumerate() {
                if s >> v & 1 == 1 {
                    w += l;
                }
            }
            w
        })
        .collect();
    ExactDistribution::from_log_weights(g.n(), weights)
}

pub fn enumerate_rc(g: &Graph, params: &RcParams) -> Result<ExactDistribution> {
    let params = params.clone().for_graph(g)?;
    check_cap(g.m())?;
    let (ln_in, ln_out) = ln_bernoulli_tables(params.p());
    let lambda = params.lambda();
    let mut comp_zero = vec![false; g.n()];
    let mut comp_ln = vec![0.0f64; g.n()];
    let weights = (0..1u64 << g.m())
        .map(|s| {
            let mut w = 0.0;
            for e in 0..g.m() {
                w += if s >> e & 1 == 1 { ln_in[e] } else { ln_out[e] };
            }
            if w == f64::NEG_INFINITY {
                return w;
            }
            let mut uf = UnionFind::new(g.n());
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                if s >> e & 1 == 1 {
                    uf.union(u, v);
                }
            }
            comp_zero.fill(false);
            comp_ln.fill(0.0);
            for (v, &l) in lambda.iter().enumerate() {
                let r = uf.find(v);
                if l == 0.0 {
                    comp_zero[r] = true;
                } else {
                    comp_ln[r] += l.ln();
                }
            }
            for v in 0..g.n() {
                if uf.find(v) == v && !comp_zero[v] {
                    w += ln_one_plus_exp(comp_ln[v]);
                }
            }
            w
        })
        .collect();
    ExactDistribution::from_log_weights(g.m(), weights)
}

pub fn enumerate_gsw(g: &Graph, params: &GswParams) -> Result<ExactDistribution> {
    let params = params.clone().for_graph(g)?;
    check_cap(g.m())?;
    let (ln_in, ln_out) = ln_bernoulli_tables(params.p());
    let ln_eta: Vec<f64> = params.eta().iter().map(|&h| ln_or_neg_inf(h)).collect();
    let mut parity = vec![false; g.n()];
    let weights = (0..1u64 << g.m())
        .map(|s| {
            let mut w = 0.0;
            parity.fill(false);
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                if s >> e & 1 == 1 {
                    w += ln_in[e];
                    parity[u] ^= true;
                    parity[v] ^= true;
                } else {
                    w += ln_out[e];
                }
            }
            for v in 0..g.n() {
                if parity[v] == params.sigma()[v] {
                    w += ln_eta[v];
                }
            }
            w
        })
        .collect();
    ExactDistribution::from_log_weights(g.m(), weights)
}

/// Log partition functions of the three related models for one Ising instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionReport {
    pub ln_z_ising: f64,
    pub ln_z_rc: f64,
    pub ln_z_sw: f64,
    /// `sum_e ln beta_e`.
    pub ln_beta_product: f64,
    /// `sum_v ln(1 + lambda_v)`.
    pub ln_field_product: f64,
}

impl PartitionReport {
    /// `ln((prod beta) Z^RC)`.
    pub fn ln_rc_side(&self) -> f64 {
        self.ln_beta_product + self.ln_z_rc
    }

    /// `ln((prod beta)(prod (1 + lambda)) Z^SW)`.
    pub fn ln_sw_side(&self) -> f64 {
        self.ln_beta_product + self.ln_field_product + self.ln_z_sw
    }

    pub fn rel_err_rc(&self) -> f64 {
        (self.ln_rc_side() - self.ln_z_ising).exp_m1().abs()
    }

    pub fn rel_err_sw(&self) -> f64 {
        (self.ln_sw_side() - self.ln_z_ising).exp_m1().abs()
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.rel_err_rc() <= tol && self.rel_err_sw() <= tol
    }
}

/// Enumerates `Z^Ising`, `Z^RC` at `p = 1 - 1/beta` and `Z^SW` at edge
/// parameter `p/2`, `eta = (1-lambda)/(1+lambda)`, all-ones parity.
pub fn verify_partition_identity(g: &Graph, ising: &IsingParams) -> Result<PartitionReport> {
    if ising.high_field() {
        return Err(Error::Unsupported("the identity is stated for fields in [0, 1]".into()));
    }
    let ising = ising.clone().for_graph(g)?;
    let rc = RcParams::new(ising.rc_edge_probabilities(), ising.lambda().to_vec())?;
    let sw = rc.subgraph_world();
    Ok(PartitionReport {
        ln_z_ising: enumerate_ising(g, &ising)?.log_z(),
        ln_z_rc: enumerate_rc(g, &rc)?.log_z(),
        ln_z_sw: enumerate_gsw(g, &sw)?.log_z(),
        ln_beta_product: ising.ln_beta_product(),
        ln_field_product: ising.lambda().iter().map(|l| l.ln_1p()).sum(),
    })
}

/// `lambda^C / (1 + lambda^C)` from `ln lambda^C`, or 0 for a zero product.
pub fn cluster_inclusion_probability(zero: bool, ln_product: f64) -> f64 {
    if zero {
        0.0
    } else {
        1.0 / (1.0 + (-ln_product).exp())
    }
}

/// Vertex-subset distribution obtained by rounding each component of an RC
/// configuration into the output independently with probability
/// `lambda^C / (1 + lambda^C)`.
pub fn es_pushforward(rc_dist: &ExactDistribution, g: &Graph, lambda: &[f64]) -> Result<ExactDistribution> {
    if rc_dist.size() != g.m() || lambda.len() != g.n() {
        return Err(invalid("pushforward dimensions do not match the graph"));
    }
    check_cap(g.n())?;
    let mut out = vec![0.0f64; 1usize << g.n()];
    let mut branches: Vec<(u64, f64)> = Vec::new();
    for (s, &p) in rc_dist.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let config = EdgeConfig::from_mask(g.m(), s as u64);
        let comps = g.components(&config);
        let mut vmask = vec![0u64; comps.count];
        let mut zero = vec![false; comps.count];
        let mut ln = vec![0.0f64; comps.count];
        for (v, &c) in comps.label.iter().enumerate() {
            vmask[c] |= 1 << v;
            if lambda[v] == 0.0 {
                zero[c] = true;
            } else {
                ln[c] += lambda[v].ln();
            }
        }
        branches.clear();
        branches.push((0, p));
        for c in 0..comps.count {
            let r = cluster_inclusion_probability(zero[c], ln[c]);
            let len = branches.len();
            for k in 0..len {
                let (mask, q) = branches[k];
                branches[k].1 = q * (1.0 - r);
                if r > 0.0 {
                    branches.push((mask | vmask[c], q * r));
                }
            }
        }
        for &(mask, q) in &branches {
            out[mask as usize] += q;
        }
    }
    ExactDistribution::from_masses(g.n(), out)
}

/// `½ Σ |a − b|`.
pub fn tv_distance(a: &ExactDistribution, b: &ExactDistribution) -> Result<f64> {
    if a.size() != b.size() {
        return Err(invalid(format!("ground sets differ: {} vs {}", a.size(), b.size())));
    }
    Ok(0.5 * a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Pairwise influences `Psi(i, j) = mu(i | j) - mu(i | not j)`, zero on the
/// diagonal and in columns whose marginal is 0 or 1.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceMatrix {
    size: usize,
    psi: Vec<f64>,
    marginals: Vec<f64>,
}

impl InfluenceMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.psi[i * self.size + j]
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    /// `max_i sum_j |Psi(i, j)|`.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max_j sum_i |Psi(i, j)|`: total influence of conditioning on one element.
    pub fn max_col_sum(&self) -> f64 {
        (0..self.size)
            .map(|j| (0..self.size).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Infinity norm, the maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.max_row_sum()
    }
}

pub fn influence_matrix(dist: &ExactDistribution) -> InfluenceMatrix {
    let m = dist.size();
    let mut mass_in = vec![0.0f64; m];
    let mut mass_out = vec![0.0f64; m];
    // both[i * m + j] = Pr[i in S, j in S], split[i * m + j] = Pr[i in S, j not in S]
    let mut both = vec![0.0f64; m * m];
    let mut split = vec![0.0f64; m * m];
    for (s, &p) in dist.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for j in 0..m {
            if s >> j & 1 == 1 {
                mass_in[j] += p;
            } else {
                mass_out[j] += p;
            }
        }
        for i in (0..m).filter(|i| s >> i & 1 == 1) {
            for j in 0..m {
                if s >> j & 1 == 1 {
                    both[i * m + j] += p;
                } else {
                    split[i * m + j] += p;
                }
            }
        }
    }
    let mut psi = vec![0.0f64; m * m];
    for j in 0..m {
        if mass_in[j] == 0.0 || mass_out[j] == 0.0 {
            continue;
        }
        for i in (0..m).filter(|&i| i != j) {
            psi[i * m + j] = both[i * m + j] / mass_in[j] - split[i * m + j] / mass_out[j];
        }
    }
    InfluenceMatrix { size: m, psi, marginals: mass_in }
}

/// Random-cluster parameters realizing the pinning `S ∩ pinned = tau ∩ pinned`:
/// `p_e` becomes 1 on `pinned ∩ tau`, 0 on `pinned ∖ tau`.
pub fn pin(params: &RcParams, tau: &EdgeConfig, pinned: &[usize]) -> Result<RcParams> {
    let mut p = params.p().to_vec();
    if tau.ground_size() != p.len() {
        return Err(invalid("pinning configuration does not match the edge count"));
    }
    for &e in pinned {
        if e >= p.len() {
            return Err(invalid(format!("pinned edge {e} outside 0..{}", p.len())));
        }
        p[e] = if tau.contains(e) { 1.0 } else { 0.0 };
    }
    RcParams::new(p, params.lambda().to_vec())
}

/// Inverse-CDF sampler over an exact table.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    size: usize,
    cdf: Vec<f64>,
}

impl ExactSampler {
    pub fn new(dist: &ExactDistribution) -> Self {
        let mut acc = 0.0;
        let cdf = dist
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        ExactSampler { size: dist.size(), cdf }
    }

    pub fn sample_mask<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cdf.last().expect("tables are never empty");
        let r = rng.random::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= r);
        // r < total keeps idx in range except for rounding at the top end
        idx.min(self.cdf.len() - 1) as u64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Subset {
        Subset::from_mask(self.size, self.sample_mask(rng))
    }
}

pub fn exact_sample<R: Rng + ?Sized>(dist: &ExactDistribution, rng: &mut R) -> Subset {
    ExactSampler::new(dist).sample(rng)
}

/// Empirical distribution of sampled masks.
pub fn empirical(size: usize, masks: impl IntoIterator<Item = u64>) -> Result<ExactDistribution> {
    check_cap(size)?;
    let mut counts = vec![0.0f64; 1usize << size];
    for s in masks {
        counts[s as usize] += 1.0;
    }
    ExactDistribution::from_masses(size, counts)
}
