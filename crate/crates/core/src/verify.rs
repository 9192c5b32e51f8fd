//! Invariant suites over small instances, each reduced to `PASS`/`FAIL`
//! lines of the form `STATUS suite/name lhs rhs tol`.

use crate::coupling::verify_sw_rc_convolution;
use crate::error::{Error, Result};
use crate::exact::{enumerate_ising, enumerate_rc, es_pushforward, influence_matrix, tv_distance, verify_partition_identity};
use crate::gen;
use crate::glauber::GlauberState;
use crate::io::Instance;
use crate::model::{rc_weight, EdgeConfig, Graph, IsingParams, RcParams};
use crate::rng::stream_rng;
use std::fmt;
use std::str::FromStr;

/// Largest edge count the glauber and influence suites enumerate per
/// instance, since both are quadratic in `2^m`-sized work.
pub const SUITE_EDGE_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Partition,
    Es,
    Glauber,
    Influence,
    Convolution,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Partition, Suite::Es, Suite::Glauber, Suite::Influence, Suite::Convolution];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Partition => "partition",
            Suite::Es => "es",
            Suite::Glauber => "glauber",
            Suite::Influence => "influence",
            Suite::Convolution => "convolution",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One comparison. `pass` is fixed when the check is built.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// `|lhs - rhs| ≤ tol`.
    pub fn close(suite: Suite, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = (lhs - rhs).abs() <= tol;
        Check { suite, name: name.into(), lhs, rhs, tol, pass }
    }

    /// Logarithms of two positive quantities agreeing to relative error `tol`.
    pub fn close_ln(suite: Suite, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = (lhs - rhs).exp_m1().abs() <= tol;
        Check { suite, name: name.into(), lhs, rhs, tol, pass }
    }

    /// `lhs ≤ rhs + tol`.
    pub fn at_most(suite: Suite, name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let pass = lhs <= rhs + tol;
        Check { suite, name: name.into(), lhs, rhs, tol, pass }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{} {:.12e} {:.12e} {:e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.lhs,
            self.rhs,
            self.tol
        )
    }
}

/// An instance seen through both parameterizations. The Ising view exists
/// when every `p_e` lies in `(0, 1)`; fields are kept in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct VerifyInstance {
    pub name: String,
    pub graph: Graph,
    pub rc: RcParams,
    pub ising: Option<IsingParams>,
}

impl VerifyInstance {
    pub fn from_ising(name: impl Into<String>, graph: Graph, ising: IsingParams) -> Result<Self> {
        let ising = ising.for_graph(&graph)?;
        let ising = if ising.high_field() {
            // the complement map inverts every field and preserves the edge law
            IsingParams::from_beta_minus_one(
                ising.beta_minus_one().to_vec(),
                ising.lambda().iter().map(|l| 1.0 / l).collect(),
            )?
        } else {
            ising
        };
        let rc = RcParams::new(ising.rc_edge_probabilities(), ising.lambda().to_vec())?;
        Ok(VerifyInstance { name: name.into(), graph, rc, ising: Some(ising) })
    }

    pub fn from_rc(name: impl Into<String>, graph: Graph, rc: RcParams) -> Result<Self> {
        let rc = rc.for_graph(&graph)?;
        let ising = if rc.p().iter().all(|&p| p > 0.0 && p < 1.0) && rc.lambda_max() <= 1.0 {
            // beta - 1 = p / (1 - p)
            let b: Vec<f64> = rc.p().iter().map(|&p| p / (1.0 - p)).collect();
            Some(IsingParams::from_beta_minus_one(b, rc.lambda().to_vec())?)
        } else {
            None
        };
        Ok(VerifyInstance { name: name.into(), graph, rc, ising })
    }

    /// Reads an instance file as Ising (`beta_e`) or random-cluster (`p_e`).
    pub fn from_instance(name: impl Into<String>, inst: &Instance, ising_values: bool) -> Result<Self> {
        if ising_values {
            Self::from_ising(name, inst.graph.clone(), inst.ising_params()?)
        } else {
            Self::from_rc(name, inst.graph.clone(), inst.rc_params()?)
        }
    }
}

/// The named corpus graphs with seeded Ising parameters, `beta ∈ (1, 5]`
/// and `lambda ∈ [0, 0.8]`.
pub fn stock_corpus() -> Vec<VerifyInstance> {
    gen::corpus()
        .into_iter()
        .enumerate()
        .map(|(i, (name, g))| {
            let mut rng = stream_rng(0x5eed, i as u64);
            let ising = gen::random_ising_params(&g, (1.000001, 5.0), (0.0, 0.8), &mut rng);
            VerifyInstance::from_ising(name, g, ising).expect("corpus parameters are valid")
        })
        .collect()
}

pub fn run_suite(suite: Suite, instances: &[VerifyInstance]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for inst in instances {
        match suite {
            Suite::Partition => partition(inst, &mut out)?,
            Suite::Es => es(inst, &mut out)?,
            Suite::Glauber => glauber(inst, &mut out)?,
            Suite::Influence => influence(inst, &mut out)?,
            Suite::Convolution => convolution(inst, &mut out)?,
        }
    }
    Ok(out)
}

fn partition(inst: &VerifyInstance, out: &mut Vec<Check>) -> Result<()> {
    let Some(ising) = &inst.ising else { return Ok(()) };
    let r = verify_partition_identity(&inst.graph, ising)?;
    out.push(Check::close_ln(Suite::Partition, format!("{}/rc", inst.name), r.ln_z_ising, r.ln_rc_side(), 1e-10));
    out.push(Check::close_ln(Suite::Partition, format!("{}/sw", inst.name), r.ln_z_ising, r.ln_sw_side(), 1e-10));
    Ok(())
}

fn es(inst: &VerifyInstance, out: &mut Vec<Check>) -> Result<()> {
    let Some(ising) = &inst.ising else { return Ok(()) };
    let pushed = es_pushforward(&enumerate_rc(&inst.graph, &inst.rc)?, &inst.graph, inst.rc.lambda())?;
    let tv = tv_distance(&pushed, &enumerate_ising(&inst.graph, ising)?)?;
    out.push(Check::at_most(Suite::Es, inst.name.clone(), tv, 0.0, 1e-10));
    Ok(())
}

/// Conditional inclusion probabilities against weight ratios, and detailed
/// balance of the single-edge kernel, over every configuration and edge.
fn glauber(inst: &VerifyInstance, out: &mut Vec<Check>) -> Result<()> {
    let g = &inst.graph;
    let m = g.m();
    if m > SUITE_EDGE_CAP {
        return Err(Error::CapExceeded { size: m, cap: SUITE_EDGE_CAP });
    }
    let mu = enumerate_rc(g, &inst.rc)?;
    let mut state = GlauberState::new(g, &inst.rc)?;
    let (mut cond_err, mut balance_err): (f64, f64) = (0.0, 0.0);
    for x in 0..1u64 << m {
        let config = EdgeConfig::from_mask(m, x);
        state.set_config(&config)?;
        for e in 0..m {
            if x >> e & 1 == 1 {
                continue;
            }
            let q = state.transition_probability(e)?;
            let with = x | 1 << e;
            let w_out = rc_weight(g, &inst.rc, &config)?;
            let w_in = rc_weight(g, &inst.rc, &EdgeConfig::from_mask(m, with))?;
            let ratio = if w_in.is_zero() {
                0.0
            } else if w_out.is_zero() {
                1.0
            } else {
                1.0 / (1.0 + (w_out.ln() - w_in.ln()).exp())
            };
            cond_err = cond_err.max((q - ratio).abs());
            let step = 1.0 / m as f64;
            let flow_up = mu.prob(x) * step * q;
            let flow_down = mu.prob(with) * step * (1.0 - q);
            balance_err = balance_err.max((flow_up - flow_down).abs());
        }
    }
    out.push(Check::at_most(Suite::Glauber, format!("{}/conditional", inst.name), cond_err, 0.0, 1e-10));
    out.push(Check::at_most(Suite::Glauber, format!("{}/balance", inst.name), balance_err, 0.0, 1e-12));
    Ok(())
}

/// Both the largest absolute row sum and the largest absolute column sum
/// of the influence matrix against `2 (1 - lambda_max)^{-2}`.
fn influence(inst: &VerifyInstance, out: &mut Vec<Check>) -> Result<()> {
    let m = inst.graph.m();
    if m > SUITE_EDGE_CAP {
        return Err(Error::CapExceeded { size: m, cap: SUITE_EDGE_CAP });
    }
    let lmax = inst.rc.lambda_max();
    if lmax >= 1.0 {
        return Ok(());
    }
    let bound = 2.0 / ((1.0 - lmax) * (1.0 - lmax));
    let psi = influence_matrix(&enumerate_rc(&inst.graph, &inst.rc)?);
    out.push(Check::at_most(Suite::Influence, format!("{}/row", inst.name), psi.max_row_sum(), bound, 1e-12));
    out.push(Check::at_most(Suite::Influence, format!("{}/col", inst.name), psi.max_col_sum(), bound, 1e-12));
    Ok(())
}

fn convolution(inst: &VerifyInstance, out: &mut Vec<Check>) -> Result<()> {
    let r = verify_sw_rc_convolution(&inst.graph, &inst.rc)?;
    out.push(Check::at_most(Suite::Convolution, inst.name.clone(), r.max_abs_err, 0.0, 1e-10));
    Ok(())
}
