//! `fieldsamp`: sampling, exact enumeration, invariant suites, coupling
//! estimates and scaling benchmarks from the command line.
//!
//! Exit status: 0 on success, 1 when a verification or coupling check
//! fails, 2 on usage, parse or domain errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fieldsamp_core::coupling::{
    edge_bound, estimate_coupling_independence, lift_bound, vertex_bound, EdgeCoupler, LiftCoupler, VertexCoupler,
};
use fieldsamp_core::exact::{enumerate_ising, enumerate_rc, ExactDistribution};
use fieldsamp_core::field::{IsingSampler, PracticalOverrides, RcSampler, SamplerReport, ScheduleSpec};
use fieldsamp_core::glauber::GlauberState;
use fieldsamp_core::io::{parse_instance, Instance};
use fieldsamp_core::model::{RcParams, Subset};
use fieldsamp_core::rng::stream_rng;
use fieldsamp_core::verify::{run_suite, stock_corpus, Suite, VerifyInstance};
use fieldsamp_core::{gen, Error};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// Environment variable capping the replica worker pool.
const THREADS_VAR: &str = "FIELDSAMP_THREADS";

#[derive(Parser)]
#[command(name = "fieldsamp", version, about = "Field-dynamics samplers for Ising and random-cluster models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw independent samples, one configuration per line.
    Sample(SampleArgs),
    /// Print the log partition function and optionally the full table.
    Exact(ExactArgs),
    /// Run invariant suites on the stock corpus or on one instance.
    Verify(VerifyArgs),
    /// Estimate the mean discrepancy of a coupling and compare with its bound.
    Couple(CoupleArgs),
    /// Time Glauber steps on sparse random graphs and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    /// Edge values are `beta_e > 1`; samples are vertex sets.
    Ising,
    /// Edge values are `p_e ∈ [0, 1]`; samples are edge sets.
    Rc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Paper,
    Practical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CouplerKind {
    /// Subgraph-world coupling of the two parities at a vertex.
    Vertex,
    /// Subgraph-world coupling of the two states of an edge.
    Edge,
    /// Random-cluster coupling of the two states of an edge.
    Lift,
}

#[derive(Args)]
struct SampleArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "ising")]
    model: ModelKind,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "practical")]
    mode: Mode,
    /// Practical mode only.
    #[arg(long)]
    theta: Option<f64>,
    /// Practical mode only: outer field-dynamics rounds.
    #[arg(long)]
    tfd: Option<u64>,
    /// Practical mode only: Glauber steps per round.
    #[arg(long)]
    tgd: Option<u64>,
    /// Practical mode only: edge count at or below which samples are exact.
    #[arg(long)]
    brute_force_edges: Option<usize>,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append wall-time lines to the report; output then varies between runs.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct ExactArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "ising")]
    model: ModelKind,
    /// Also print every configuration with its probability.
    #[arg(long)]
    table: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance to check instead of the stock corpus.
    instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ising")]
    model: ModelKind,
    /// Run a single suite: partition, es, glauber, influence or convolution.
    #[arg(long)]
    suite: Option<String>,
}

#[derive(Args)]
struct CoupleArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "ising")]
    model: ModelKind,
    #[arg(long, value_enum, default_value = "vertex")]
    coupler: CouplerKind,
    /// Vertex id for the vertex coupler, edge id otherwise.
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[arg(long, default_value_t = 10_000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Vertex counts; each graph has `2n` random edges.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 200_000)]
    steps: u64,
    /// Untimed steps run first at each size.
    #[arg(long, default_value_t = 100_000)]
    warmup: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
        }
    }
}

fn worker_count() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn ids_line(s: &Subset) -> String {
    s.ids().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

/// Random-cluster view of an instance. Ising edge values become
/// `p = 1 - 1/beta`; fields above 1 are inverted.
fn rc_view(inst: &Instance, model: ModelKind) -> Result<RcParams, Failure> {
    let v = VerifyInstance::from_instance("input", inst, model == ModelKind::Ising)?;
    Ok(v.rc)
}

fn schedule_spec(a: &SampleArgs) -> Result<ScheduleSpec, Failure> {
    let overrides = PracticalOverrides {
        theta: a.theta,
        t_fd: a.tfd,
        t_gd: a.tgd,
        brute_force_edges: a.brute_force_edges,
    };
    match a.mode {
        Mode::Practical => Ok(ScheduleSpec::Practical(overrides)),
        Mode::Paper if overrides == PracticalOverrides::default() => Ok(ScheduleSpec::Paper),
        Mode::Paper => Err(usage("--theta, --tfd, --tgd and --brute-force-edges apply to the practical mode only")),
    }
}

fn cmd_sample(a: SampleArgs) -> Outcome {
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    if a.replicas == 0 {
        return Err(usage("--replicas must be at least 1"));
    }
    let spec = schedule_spec(&a)?;
    let inst = read_instance(&a.instance)?;
    let setup = Instant::now();
    enum Sampler {
        Ising(IsingSampler),
        Rc(RcSampler),
    }
    let sampler = match a.model {
        ModelKind::Ising => Sampler::Ising(IsingSampler::new(&inst.graph, &inst.ising_params()?, a.eps, spec)?),
        ModelKind::Rc => {
            let params = inst.rc_params()?;
            let schedule = spec.build(a.eps, &inst.graph, &params)?;
            Sampler::Rc(RcSampler::new(&inst.graph, &params, schedule)?)
        }
    };
    let rc = match &sampler {
        Sampler::Ising(s) => s.rc(),
        Sampler::Rc(s) => s,
    };
    let (schedule, brute_force) = (rc.schedule().clone(), rc.uses_brute_force());
    let setup_time = setup.elapsed();

    let sampling = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let lines: Vec<String> = pool.install(|| {
        (0..a.replicas)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(a.seed, i as u64);
                match &sampler {
                    Sampler::Ising(s) => ids_line(&s.sample(&mut rng)),
                    Sampler::Rc(s) => ids_line(&s.sample(&mut rng)),
                }
            })
            .collect()
    });
    let report = SamplerReport {
        samples: a.replicas,
        seed: a.seed,
        schedule,
        brute_force,
        phases: vec![("setup".into(), setup_time), ("sample".into(), sampling.elapsed())],
    };

    let mut text = String::new();
    for line in &lines {
        let _ = writeln!(text, "{line}");
    }
    let model = match a.model {
        ModelKind::Ising => "ising",
        ModelKind::Rc => "rc",
    };
    let _ = writeln!(text, "# model {model} eps {}", a.eps);
    for line in report.footer(a.timings) {
        let _ = writeln!(text, "{line}");
    }
    emit(&a.out, &text)?;
    Ok(0)
}

fn cmd_exact(a: ExactArgs) -> Outcome {
    let inst = read_instance(&a.instance)?;
    let dist: ExactDistribution = match a.model {
        ModelKind::Ising => enumerate_ising(&inst.graph, &inst.ising_params()?)?,
        ModelKind::Rc => enumerate_rc(&inst.graph, &inst.rc_params()?)?,
    };
    let mut text = String::new();
    let _ = writeln!(text, "ln_z {:.17e}", dist.log_z());
    let _ = writeln!(text, "z {:.17e}", dist.log_z().exp());
    if a.table {
        for (mask, p) in dist.probs().iter().enumerate() {
            let s = Subset::from_mask(dist.size(), mask as u64);
            let _ = writeln!(text, "{p:.17e} {}", ids_line(&s));
        }
    }
    emit(&a.out, &text)?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let suites: Vec<Suite> = match &a.suite {
        Some(name) => vec![name.parse::<Suite>().map_err(|e| usage(e.to_string()))?],
        None => Suite::ALL.to_vec(),
    };
    let instances = match &a.instance {
        Some(path) => {
            let inst = read_instance(path)?;
            let name = path.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned());
            vec![VerifyInstance::from_instance(name, &inst, a.model == ModelKind::Ising)?]
        }
        None => stock_corpus(),
    };
    let (mut total, mut failed) = (0, 0);
    let mut text = String::new();
    for suite in suites {
        for check in run_suite(suite, &instances)? {
            total += 1;
            failed += usize::from(!check.pass);
            let _ = writeln!(text, "{check}");
        }
    }
    let _ = writeln!(text, "# {total} checks, {failed} failed");
    emit(&None, &text)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

fn cmd_couple(a: CoupleArgs) -> Outcome {
    if a.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    let inst = read_instance(&a.instance)?;
    let rc = rc_view(&inst, a.model)?;
    let g = &inst.graph;
    let mut rng = stream_rng(a.seed, 0);
    let sw = rc.subgraph_world();
    let (est, bound) = match a.coupler {
        CouplerKind::Vertex => {
            let c = VertexCoupler::new(g, &sw, a.target)?;
            (estimate_coupling_independence(&c, a.runs, &mut rng)?, vertex_bound(sw.eta_min()))
        }
        CouplerKind::Edge => {
            let c = EdgeCoupler::new(g, &sw, a.target)?;
            (estimate_coupling_independence(&c, a.runs, &mut rng)?, edge_bound(sw.eta_min()))
        }
        CouplerKind::Lift => {
            let c = LiftCoupler::new(g, &rc, a.target)?;
            (estimate_coupling_independence(&c, a.runs, &mut rng)?, lift_bound(rc.lambda_max()))
        }
    };
    let pass = est.mean <= bound + 3.0 * est.stderr;
    let kind = match a.coupler {
        CouplerKind::Vertex => "vertex",
        CouplerKind::Edge => "edge",
        CouplerKind::Lift => "lift",
    };
    let text = format!(
        "coupler {kind} target {} runs {}\nmean {:.6} stderr {:.6} bound {:.6}\n{}\n",
        a.target,
        est.runs,
        est.mean,
        est.stderr,
        bound,
        if pass { "PASS" } else { "FAIL" }
    );
    emit(&None, &text)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_bench(a: BenchArgs) -> Outcome {
    if a.sizes.iter().any(|&n| n < 2) || a.steps == 0 {
        return Err(usage("sizes must be at least 2 and --steps positive"));
    }
    let mut text = String::from("n,m,steps,seconds,ns_per_step,ratio_to_first\n");
    let mut first = None;
    for (i, &n) in a.sizes.iter().enumerate() {
        let mut rng = stream_rng(a.seed, i as u64);
        let g = gen::random_multigraph(n, 2 * n, &mut rng);
        let params = RcParams::new(vec![0.5; g.m()], vec![0.5; n])?;
        let mut state = GlauberState::new(&g, &params)?;
        state.run(a.warmup, &mut rng);
        let start = Instant::now();
        state.run(a.steps, &mut rng);
        let secs = start.elapsed().as_secs_f64();
        let per = secs * 1e9 / a.steps as f64;
        let base = *first.get_or_insert(per);
        let _ = writeln!(text, "{n},{},{},{secs:.6},{per:.1},{:.3}", g.m(), a.steps, per / base);
    }
    emit(&a.out, &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Couple(a) => cmd_couple(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
