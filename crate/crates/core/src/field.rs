//! Field dynamics simulator for the random-cluster model and the Ising
//! sampler built on top of it.
//!
//! One field-dynamics round from `X` draws `S' ~ Ber(theta)^E`, sets
//! `S = S' ∪ X` and replaces `X` by a Glauber run on the active instance
//! `(V, S)` with `p*_e = p_e / (theta (1 - p_e) + p_e)`, started from `X = S`.
//! With an exact inner sampler this is the field dynamics for the tilted
//! measure `theta^{-1} * mu^RC`, whose stationary law is `mu^RC` itself.

use crate::error::{domain, invalid, Error, Result};
use crate::exact::{cluster_inclusion_probability, enumerate_rc, ExactSampler, ENUMERATION_CAP};
use crate::glauber::{glauber_steps_ln, GlauberState};
use crate::model::{p_star, EdgeConfig, Graph, IsingParams, RcParams, VertexConfig};
use rand::Rng;
use std::fmt;
use std::time::Duration;

/// Edge count at or below which the practical schedule samples by enumeration.
pub const DEFAULT_BRUTE_FORCE_EDGES: usize = 20;

/// Outer-loop constant of the practical schedule, `t_fd = ⌈C ln(m/eps)⌉`.
pub const PRACTICAL_FD_CONSTANT: f64 = 20.0;

/// Largest `ln T` for which `T` is stored as an integer.
const LN_COUNT_LIMIT: f64 = 43.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleMode {
    Paper,
    Practical,
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleMode::Paper => "paper",
            ScheduleMode::Practical => "practical",
        })
    }
}

/// Parameters of the simulator. Quantities that overflow `f64` under the
/// worst-case constants are held as natural logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    mode: ScheduleMode,
    ln_theta: f64,
    ln_t_fd: f64,
    t_fd: Option<u64>,
    t_gd: u64,
    /// Paper mode only: `ln N0` and `ln K`.
    ln_n0: Option<f64>,
    ln_k: Option<f64>,
    brute_force_edges: usize,
}

fn count_from_ln(ln: f64) -> (f64, Option<u64>) {
    if ln < LN_COUNT_LIMIT {
        let t = ln.exp().ceil().max(1.0) as u64;
        ((t as f64).ln(), Some(t))
    } else {
        (ln, None)
    }
}

/// `⌈2m(ln m + ln(2 t_fd / eps))⌉` with `t_fd` given as `ln t_fd`.
pub fn inner_steps(m: usize, eps: f64, ln_t_fd: f64) -> u64 {
    glauber_steps_ln(m, eps.ln() - ln_t_fd)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("eps must lie in (0, 1), got {eps}")))
    }
}

/// The worst-case schedule. `n` must be at least 2 so that `ln ln n` exists.
pub fn schedule_paper(eps: f64, p_min: f64, lambda_max: f64, n: usize, m: usize) -> Result<Schedule> {
    check_eps(eps)?;
    if !(p_min > 0.0 && p_min <= 1.0) {
        return Err(domain(format!("p_min must lie in (0, 1], got {p_min}")));
    }
    if !(0.0..1.0).contains(&lambda_max) {
        return Err(domain(format!("lambda_max must lie in [0, 1), got {lambda_max}")));
    }
    if n < 2 {
        return Err(domain("the worst-case schedule needs at least 2 vertices"));
    }
    let gap = (1.0 - lambda_max).powi(-2);
    let ln_n = (n as f64).ln();
    let ln_k = 1e-14f64.ln() + 2.0 * eps.ln() - 28.0 * gap;
    let ln_theta = ln_k + p_min.ln() - ln_n.ln();
    let log_term = 2.0 * ln_n + (2.0 / p_min).ln().ln() + (2.0 / (eps * eps)).ln();
    let (ln_t_fd, t_fd) = count_from_ln(5.0 * gap * (1.0 - ln_theta) + log_term.ln());
    let ln_n0 = (12.0 * gap)
        .max(3f64.ln() - p_min.ln())
        .max(0.5 * (2.0 / (eps * eps)).ln().ln());
    Ok(Schedule {
        mode: ScheduleMode::Paper,
        ln_theta,
        ln_t_fd,
        t_fd,
        t_gd: inner_steps(m, eps, ln_t_fd),
        ln_n0: Some(ln_n0),
        ln_k: Some(ln_k),
        brute_force_edges: DEFAULT_BRUTE_FORCE_EDGES,
    })
}

/// Optional replacements for the practical defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PracticalOverrides {
    pub theta: Option<f64>,
    pub t_fd: Option<u64>,
    pub t_gd: Option<u64>,
    pub brute_force_edges: Option<usize>,
}

/// `theta = 0.5`, `t_fd = ⌈20 ln(m/eps)⌉`, `t_gd = ⌈2m(ln m + ln(2 t_fd/eps))⌉`.
pub fn schedule_practical(m: usize, eps: f64) -> Result<Schedule> {
    schedule_practical_with(m, eps, PracticalOverrides::default())
}

/// Practical schedule with overrides; a default `t_gd` follows the
/// (possibly overridden) `t_fd`.
pub fn schedule_practical_with(m: usize, eps: f64, o: PracticalOverrides) -> Result<Schedule> {
    check_eps(eps)?;
    let theta = o.theta.unwrap_or(0.5);
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(domain(format!("theta must lie in (0, 1], got {theta}")));
    }
    let t_fd = match o.t_fd {
        Some(0) => return Err(domain("t_fd must be at least 1")),
        Some(t) => t,
        None => (PRACTICAL_FD_CONSTANT * ((m.max(1) as f64) / eps).ln()).ceil().max(1.0) as u64,
    };
    let t_gd = match o.t_gd {
        Some(0) => return Err(domain("t_gd must be at least 1")),
        Some(t) => t,
        None => inner_steps(m, eps, (t_fd as f64).ln()).max(1),
    };
    Ok(Schedule {
        mode: ScheduleMode::Practical,
        ln_theta: theta.ln(),
        ln_t_fd: (t_fd as f64).ln(),
        t_fd: Some(t_fd),
        t_gd,
        ln_n0: None,
        ln_k: None,
        brute_force_edges: o.brute_force_edges.unwrap_or(DEFAULT_BRUTE_FORCE_EDGES),
    })
}

impl Schedule {
    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    /// `theta`; underflows to 0 in paper mode for most inputs.
    pub fn theta(&self) -> f64 {
        self.ln_theta.exp()
    }

    pub fn ln_theta(&self) -> f64 {
        self.ln_theta
    }

    /// Outer iterations, when they fit in a `u64`.
    pub fn t_fd(&self) -> Option<u64> {
        self.t_fd
    }

    pub fn ln_t_fd(&self) -> f64 {
        self.ln_t_fd
    }

    pub fn t_gd(&self) -> u64 {
        self.t_gd
    }

    pub fn ln_n0(&self) -> Option<f64> {
        self.ln_n0
    }

    pub fn ln_k(&self) -> Option<f64> {
        self.ln_k
    }

    pub fn brute_force_edges(&self) -> usize {
        self.brute_force_edges
    }

    /// Paper mode compares `n` against `N0`; practical mode compares `m`
    /// against the edge cutoff.
    pub fn uses_brute_force(&self, n: usize, m: usize) -> bool {
        match (self.mode, self.ln_n0) {
            (ScheduleMode::Paper, Some(ln_n0)) => (n as f64).ln() <= ln_n0,
            _ => m <= self.brute_force_edges,
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode={} ln_theta={:.6} ", self.mode, self.ln_theta)?;
        match self.t_fd {
            Some(t) => write!(f, "t_fd={t}")?,
            None => write!(f, "ln_t_fd={:.6}", self.ln_t_fd)?,
        }
        write!(f, " t_gd={}", self.t_gd)?;
        match (self.ln_n0, self.ln_k) {
            (Some(n0), Some(k)) => write!(f, " ln_n0={n0:.6} ln_k={k:.6}"),
            _ => write!(f, " brute_force_edges={}", self.brute_force_edges),
        }
    }
}

/// How a sampler should derive its schedule from the instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleSpec {
    Paper,
    Practical(PracticalOverrides),
}

impl ScheduleSpec {
    pub fn build(&self, eps: f64, g: &Graph, params: &RcParams) -> Result<Schedule> {
        match self {
            ScheduleSpec::Paper => schedule_paper(eps, params.p_min(), params.lambda_max(), g.n(), g.m()),
            ScheduleSpec::Practical(o) => schedule_practical_with(g.m(), eps, *o),
        }
    }
}

/// One field-dynamics round on a chain whose current configuration is `X`.
fn field_round<R: Rng + ?Sized>(state: &mut GlauberState, theta: f64, p_star: &[f64], t_gd: u64, rng: &mut R) -> Result<()> {
    let mut s = state.config();
    for e in 0..s.ground_size() {
        // edges of X are in S whatever S' says
        if !s.contains(e) && rng.random::<f64>() < theta {
            s.set(e, true);
        }
    }
    state.activate(&s, p_star)?;
    state.run(t_gd, rng);
    Ok(())
}

/// A single field-dynamics round from `x` with the schedule's `theta` and
/// `t_gd`.
pub fn field_step<R: Rng + ?Sized>(
    x: &EdgeConfig,
    g: &Graph,
    params: &RcParams,
    sched: &Schedule,
    rng: &mut R,
) -> Result<EdgeConfig> {
    if x.ground_size() != g.m() {
        return Err(invalid("configuration does not match the edge count"));
    }
    let theta = sched.theta();
    if theta <= 0.0 {
        return Err(Error::Refused("theta underflows to 0; the schedule is not executable".into()));
    }
    let ps = p_star(params.p(), theta)?;
    let mut state = GlauberState::new(g, params)?;
    state.activate(x, &ps)?;
    field_round(&mut state, theta, &ps, sched.t_gd(), rng)?;
    Ok(state.config())
}

#[derive(Clone, Debug)]
enum Engine {
    Exact(ExactSampler),
    Field { theta: f64, p_star: Vec<f64>, t_fd: u64 },
}

/// Random-cluster sampler with its branch and tables fixed at construction.
#[derive(Clone, Debug)]
pub struct RcSampler {
    graph: Graph,
    params: RcParams,
    schedule: Schedule,
    engine: Engine,
}

impl RcSampler {
    /// The enumeration branch admits `lambda_v = 1`; field dynamics needs
    /// `lambda_max < 1`.
    pub fn new(g: &Graph, params: &RcParams, schedule: Schedule) -> Result<Self> {
        let params = params.clone().for_graph(g)?;
        let engine = if schedule.uses_brute_force(g.n(), g.m()) {
            if g.m() > ENUMERATION_CAP {
                return Err(Error::Refused(format!(
                    "the schedule selects enumeration over 2^{} configurations (cap 2^{ENUMERATION_CAP}); \
                     use the practical schedule for this instance",
                    g.m()
                )));
            }
            Engine::Exact(ExactSampler::new(&enumerate_rc(g, &params)?))
        } else {
            if params.lambda_max() >= 1.0 {
                return Err(domain(format!(
                    "field dynamics needs every field below 1, got lambda_max = {}",
                    params.lambda_max()
                )));
            }
            let t_fd = schedule.t_fd().ok_or_else(|| {
                Error::Refused(format!(
                    "the schedule asks for e^{:.1} outer iterations; use the practical schedule",
                    schedule.ln_t_fd()
                ))
            })?;
            let theta = schedule.theta();
            if theta <= 0.0 {
                return Err(Error::Refused("theta underflows to 0; use the practical schedule".into()));
            }
            Engine::Field { theta, p_star: p_star(params.p(), theta)?, t_fd }
        };
        Ok(RcSampler { graph: g.clone(), params, schedule, engine })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn uses_brute_force(&self) -> bool {
        matches!(self.engine, Engine::Exact(_))
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> EdgeConfig {
        match &self.engine {
            Engine::Exact(s) => s.sample(rng),
            Engine::Field { theta, p_star, t_fd } => {
                let mut state = GlauberState::new(&self.graph, &self.params).expect("validated at construction");
                for _ in 0..*t_fd {
                    field_round(&mut state, *theta, p_star, self.schedule.t_gd(), rng).expect("validated at construction");
                }
                state.config()
            }
        }
    }
}

pub fn sample_rc<R: Rng + ?Sized>(g: &Graph, params: &RcParams, sched: &Schedule, rng: &mut R) -> Result<EdgeConfig> {
    Ok(RcSampler::new(g, params, sched.clone())?.sample(rng))
}

/// Ising sampler: random-cluster sample followed by independent rounding of
/// each component. Fields above 1 are handled by inverting them and
/// complementing the output.
#[derive(Clone, Debug)]
pub struct IsingSampler {
    rc: RcSampler,
    lambda: Vec<f64>,
    complement: bool,
}

impl IsingSampler {
    pub fn new(g: &Graph, params: &IsingParams, eps: f64, spec: ScheduleSpec) -> Result<Self> {
        let params = params.clone().for_graph(g)?;
        let complement = params.high_field();
        let lambda: Vec<f64> = if complement {
            params.lambda().iter().map(|l| 1.0 / l).collect()
        } else {
            params.lambda().to_vec()
        };
        let rc_params = RcParams::new(params.rc_edge_probabilities(), lambda.clone())?;
        let schedule = spec.build(eps, g, &rc_params)?;
        Ok(IsingSampler { rc: RcSampler::new(g, &rc_params, schedule)?, lambda, complement })
    }

    pub fn rc(&self) -> &RcSampler {
        &self.rc
    }

    pub fn complemented(&self) -> bool {
        self.complement
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> VertexConfig {
        let g = self.rc.graph();
        let x = self.rc.sample(rng);
        let comps = g.components(&x);
        let mut zero = vec![false; comps.count];
        let mut ln = vec![0.0f64; comps.count];
        for (v, &c) in comps.label.iter().enumerate() {
            if self.lambda[v] == 0.0 {
                zero[c] = true;
            } else {
                ln[c] += self.lambda[v].ln();
            }
        }
        let chosen: Vec<bool> = (0..comps.count)
            .map(|c| rng.random::<f64>() < cluster_inclusion_probability(zero[c], ln[c]))
            .collect();
        let out = VertexConfig::from_bools(comps.label.iter().map(|&c| chosen[c]).collect());
        if self.complement {
            out.complement()
        } else {
            out
        }
    }
}

pub fn sample_ising<R: Rng + ?Sized>(
    g: &Graph,
    params: &IsingParams,
    eps: f64,
    spec: ScheduleSpec,
    rng: &mut R,
) -> Result<VertexConfig> {
    Ok(IsingSampler::new(g, params, eps, spec)?.sample(rng))
}

/// Run summary. The total wall time is the sum of the phases by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerReport {
    pub samples: usize,
    pub seed: u64,
    pub schedule: Schedule,
    pub brute_force: bool,
    pub phases: Vec<(String, Duration)>,
}

impl SamplerReport {
    pub fn total(&self) -> Duration {
        self.phases.iter().map(|(_, d)| *d).sum()
    }

    /// `# key value` lines; timings only on request so that default output
    /// depends on the seed alone.
    pub fn footer(&self, timings: bool) -> Vec<String> {
        let mut lines = vec![
            format!("# samples {}", self.samples),
            format!("# seed {}", self.seed),
            format!("# schedule {}", self.schedule),
            format!("# brute_force {}", self.brute_force),
        ];
        if timings {
            for (name, d) in &self.phases {
                lines.push(format!("# time_{name} {:.6}", d.as_secs_f64()));
            }
            lines.push(format!("# time_total {:.6}", self.total().as_secs_f64()));
        }
        lines
    }
}
