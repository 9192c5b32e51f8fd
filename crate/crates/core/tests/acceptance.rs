//! Acceptance suite: one `PASS`/`FAIL` line per criterion, followed by
//! indented detail lines. Exits with status 1 if any counted criterion fails.

#[path = "../../dynconn/tests/support/mod.rs"]
mod support;

use fieldsamp_core::coupling::{
    edge_bound, estimate_coupling_independence, lift_bound, verify_sw_rc_convolution, vertex_bound,
    visited_tail_bound, EdgeCoupler, LiftCoupler, PairCoupler, VertexCoupler,
};
use fieldsamp_core::exact::{empirical, enumerate_gsw, enumerate_ising, enumerate_rc, tv_distance, ExactSampler};
use fieldsamp_core::field::{
    inner_steps, schedule_paper, schedule_practical, schedule_practical_with, IsingSampler, PracticalOverrides,
    RcSampler, ScheduleSpec,
};
use fieldsamp_core::exact::{es_pushforward, influence_matrix, verify_partition_identity};
use fieldsamp_core::gen;
use fieldsamp_core::model::{IsingParams, RcParams};
use fieldsamp_core::rng::stream_rng;
use fieldsamp_core::verify::{run_suite, Suite, VerifyInstance};
use fieldsamp_dynconn::DynConn;
use rand::Rng;
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

type Run = Result<Outcome, String>;

/// Runs one criterion; the time limit is part of the verdict.
fn criterion(id: &str, title: &str, limit: Duration, f: impl FnOnce() -> Run) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let (pass, summary, details) = match result {
        Ok(o) => (o.pass && in_time, o.summary, o.details),
        Err(e) => (false, format!("error: {e}"), Vec::new()),
    };
    println!(
        "{} {id} {title} ({:.1}s, limit {}s): {summary}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    for d in details {
        println!("    {d}");
    }
    pass
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn partition_identities() -> Run {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..100u64 {
        let mut rng = stream_rng(101, i);
        let n = rng.random_range(2..=7);
        let m = rng.random_range(0..=12);
        let g = gen::random_multigraph(n, m, &mut rng);
        let ising = gen::random_ising_params(&g, (1.0 + 1e-9, 5.0), (0.0, 1.0), &mut rng);
        let r = verify_partition_identity(&g, &ising).map_err(err)?;
        let e = r.rel_err_rc().max(r.rel_err_sw());
        worst = worst.max(e);
        if !r.holds(1e-10) {
            failures.push(format!("graph {i}: n={n} m={m} rel err {e:e}"));
        }
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        summary: format!("100 random graphs, worst relative error {worst:.2e} (tol 1e-10)"),
        details: failures,
    })
}

/// Corpus graphs with three field regimes each: random in `[0, 1]`, all 0
/// and all 1.
fn corpus_ising_instances(seed: u64) -> Vec<VerifyInstance> {
    let mut out = Vec::new();
    for (i, (name, g)) in gen::corpus().into_iter().enumerate() {
        let mut rng = stream_rng(seed, i as u64);
        for (tag, range) in [("rand", (0.0, 1.0)), ("zero", (0.0, 0.0)), ("unit", (1.0, 1.0))] {
            let ising = gen::random_ising_params(&g, (1.0 + 1e-9, 5.0), range, &mut rng);
            out.push(VerifyInstance::from_ising(format!("{name}/{tag}"), g.clone(), ising).expect("valid"));
        }
    }
    out
}

fn es_exactness() -> Run {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let instances = corpus_ising_instances(202);
    for inst in instances.iter().filter(|x| x.graph.n() <= 6) {
        let ising = inst.ising.as_ref().expect("Ising view");
        let rc = enumerate_rc(&inst.graph, &inst.rc).map_err(err)?;
        let pushed = es_pushforward(&rc, &inst.graph, inst.rc.lambda()).map_err(err)?;
        let target = enumerate_ising(&inst.graph, ising).map_err(err)?;
        let diff = pushed
            .probs()
            .iter()
            .zip(target.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        worst = worst.max(diff);
        if diff > 1e-10 {
            failures.push(format!("{}: max entry difference {diff:e}", inst.name));
        }
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        summary: format!("{} corpus instances, worst entry difference {worst:.2e} (tol 1e-10)", instances.len()),
        details: failures,
    })
}

fn glauber_correctness() -> Run {
    let instances: Vec<VerifyInstance> =
        corpus_ising_instances(303).into_iter().filter(|x| x.graph.m() <= 6).collect();
    let checks = run_suite(Suite::Glauber, &instances).map_err(err)?;
    let worst = |suffix: &str| {
        checks.iter().filter(|c| c.name.ends_with(suffix)).map(|c| c.lhs).fold(0.0, f64::max)
    };
    let failures: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.to_string()).collect();
    Ok(Outcome {
        pass: failures.is_empty() && !checks.is_empty(),
        summary: format!(
            "{} instances, worst conditional error {:.2e} (tol 1e-10), worst balance error {:.2e} (tol 1e-12)",
            instances.len(),
            worst("/conditional"),
            worst("/balance")
        ),
        details: failures,
    })
}

fn sampler_tv() -> Run {
    let mut details = Vec::new();
    let g = gen::cycle(8);
    let rc = RcParams::new(vec![0.9; 8], vec![0.5; 8]).map_err(err)?;
    let exact = enumerate_rc(&g, &rc).map_err(err)?;

    let sampler = RcSampler::new(&g, &rc, schedule_practical(8, 0.05).map_err(err)?).map_err(err)?;
    let mut rng = stream_rng(404, 0);
    let masks: Vec<u64> = (0..200_000).map(|_| sampler.sample(&mut rng).mask()).collect();
    let tv_practical = tv_distance(&empirical(8, masks).map_err(err)?, &exact).map_err(err)?;
    details.push(format!(
        "cycle8 practical schedule (enumeration branch: {}), 2e5 draws: TV {tv_practical:.4} (≤ 0.05)",
        sampler.uses_brute_force()
    ));

    // the same instance with the enumeration branch disabled, so that field
    // dynamics with inner Glauber runs produces every sample
    let forced = PracticalOverrides { brute_force_edges: Some(0), ..Default::default() };
    let schedule = schedule_practical_with(8, 0.05, forced).map_err(err)?;
    let summary_schedule = schedule.to_string();
    let field = RcSampler::new(&g, &rc, schedule).map_err(err)?;
    let draws = 20_000;
    let mut rng = stream_rng(404, 1);
    let masks: Vec<u64> = (0..draws).map(|_| field.sample(&mut rng).mask()).collect();
    let tv_field = tv_distance(&empirical(8, masks).map_err(err)?, &exact).map_err(err)?;
    let reference = ExactSampler::new(&exact);
    let mut rng = stream_rng(404, 2);
    let masks: Vec<u64> = (0..draws).map(|_| reference.sample_mask(&mut rng)).collect();
    let tv_floor = tv_distance(&empirical(8, masks).map_err(err)?, &exact).map_err(err)?;
    details.push(format!(
        "cycle8 field dynamics forced ({summary_schedule}), 2e4 draws: TV {tv_field:.4} (≤ 0.05); exact sampler at the same size: {tv_floor:.4}"
    ));

    let k2 = gen::complete(2);
    let ising = IsingParams::new(&[2.0], vec![1.0, 1.0]).map_err(err)?;
    let sampler = IsingSampler::new(&k2, &ising, 0.05, ScheduleSpec::Practical(Default::default())).map_err(err)?;
    let mut rng = stream_rng(404, 3);
    let masks: Vec<u64> = (0..100_000).map(|_| sampler.sample(&mut rng).mask()).collect();
    let tv_ising = tv_distance(&empirical(2, masks).map_err(err)?, &enumerate_ising(&k2, &ising).map_err(err)?)
        .map_err(err)?;
    details.push(format!("K2 Ising beta=2 lambda=1, 1e5 draws: TV {tv_ising:.4} (≤ 0.02)"));

    Ok(Outcome {
        pass: tv_practical <= 0.05 && tv_field <= 0.05 && tv_ising <= 0.02,
        summary: format!("TV {tv_practical:.4} / {tv_field:.4} (forced field dynamics) / {tv_ising:.4}"),
        details,
    })
}

fn influence_bound() -> Run {
    let (mut worst_row, mut worst_col): (f64, f64) = (0.0, 0.0);
    let mut failures = Vec::new();
    let count = 300u64;
    for i in 0..count {
        let mut rng = stream_rng(505, i);
        let n = rng.random_range(2..=7);
        let m = rng.random_range(1..=10);
        let g = gen::random_multigraph(n, m, &mut rng);
        let lambda_cap = if i % 3 == 0 { (0.8, 0.8) } else { (0.0, 0.8) };
        let rc = gen::random_rc_params(&g, (0.01, 0.99), lambda_cap, &mut rng);
        let bound = lift_bound(rc.lambda_max());
        let psi = influence_matrix(&enumerate_rc(&g, &rc).map_err(err)?);
        let (row, col) = (psi.max_row_sum(), psi.max_col_sum());
        worst_row = worst_row.max(row / bound);
        worst_col = worst_col.max(col / bound);
        if row > bound || col > bound {
            failures.push(format!("instance {i}: row {row:.4} col {col:.4} bound {bound:.4}"));
        }
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        summary: format!(
            "{count} instances (m ≤ 10, lambda_max ≤ 0.8), largest norm/bound: rows {worst_row:.4}, columns {worst_col:.4}"
        ),
        details: failures,
    })
}

fn coupling_bounds() -> Run {
    const N: usize = 100_000;
    let mut details = Vec::new();
    let mut pass = true;
    let mut worst_tv: f64 = 0.0;
    for (i, (name, g)) in gen::corpus().into_iter().enumerate() {
        let mut rng = stream_rng(606, i as u64);
        let params = gen::random_gsw_params(&g, (0.05, 0.5), (0.3, 1.0), &mut rng);
        let eta = params.eta_min();
        let vertex = VertexCoupler::new(&g, &params, 0).map_err(err)?;
        let (mut xs, mut ys, mut visited) = (Vec::with_capacity(N), Vec::with_capacity(N), vec![0usize; g.n() + 2]);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..N {
            let s = vertex.sample_pair(&mut rng).map_err(err)?;
            xs.push(s.x.mask());
            ys.push(s.y.mask());
            visited[s.visited] += 1;
            let d = s.discrepancy as f64;
            sum += d;
            sq += d * d;
        }
        let mean = sum / N as f64;
        let se = ((sq / N as f64 - mean * mean).max(0.0) / (N as f64 - 1.0)).sqrt();
        let tv_x = tv_distance(&empirical(g.m(), xs).map_err(err)?, &enumerate_gsw(&g, &params).map_err(err)?)
            .map_err(err)?;
        let tv_y = tv_distance(&empirical(g.m(), ys).map_err(err)?, &enumerate_gsw(&g, &params.flipped(0)).map_err(err)?)
            .map_err(err)?;
        worst_tv = worst_tv.max(tv_x).max(tv_y);
        let vb = vertex_bound(eta);
        let mut ok = tv_x <= 0.02 && tv_y <= 0.02 && mean <= vb + 3.0 * se;

        // tail of the visited count against the geometric bound
        let mut tail_ok = true;
        let mut at_least = N;
        for (k, &c) in visited.iter().enumerate().skip(1) {
            let b = visited_tail_bound(eta, k);
            let margin = 3.0 * (b * (1.0 - b) / N as f64).sqrt();
            if (at_least as f64 / N as f64) > b + margin {
                tail_ok = false;
            }
            at_least -= c;
        }
        ok &= tail_ok;

        let edge = EdgeCoupler::new(&g, &params, 0).map_err(err)?;
        let est = estimate_coupling_independence(&edge, N, &mut rng).map_err(err)?;
        let eb = edge_bound(eta);
        ok &= est.mean <= eb + 3.0 * est.stderr;
        pass &= ok;
        details.push(format!(
            "{} {name}: TV x {tv_x:.4} y {tv_y:.4}; vertex mean {mean:.4} ± {se:.4} ≤ {vb:.4}; edge mean {:.4} ± {:.4} ≤ {eb:.4}; tail {}",
            if ok { "ok  " } else { "FAIL" },
            est.mean,
            est.stderr,
            if tail_ok { "dominated" } else { "VIOLATED" }
        ));
    }

    // lifted couplings on random-cluster instances with lambda_max = 0.5
    for (i, (name, g)) in gen::corpus().into_iter().enumerate().filter(|(_, (_, g))| g.m() >= 1) {
        let mut rng = stream_rng(607, i as u64);
        let mut rc = gen::random_rc_params(&g, (0.1, 0.9), (0.0, 0.5), &mut rng);
        let mut lambda = rc.lambda().to_vec();
        lambda[0] = 0.5;
        rc = RcParams::new(rc.p().to_vec(), lambda).map_err(err)?;
        let lift = LiftCoupler::new(&g, &rc, 0).map_err(err)?;
        let est = estimate_coupling_independence(&lift, 20_000, &mut rng).map_err(err)?;
        let lb = lift_bound(0.5);
        let ok = est.mean <= lb + 3.0 * est.stderr;
        pass &= ok;
        details.push(format!(
            "{} {name} lift: mean {:.4} ± {:.4} ≤ {lb:.1}",
            if ok { "ok  " } else { "FAIL" },
            est.mean,
            est.stderr
        ));
    }
    Ok(Outcome {
        pass,
        summary: format!("12 corpus instances at 1e5 runs each, worst marginal TV {worst_tv:.4}"),
        details,
    })
}

fn convolution() -> Run {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..30u64 {
        let mut rng = stream_rng(707, i);
        let n = rng.random_range(2..=7);
        let m = rng.random_range(0..=10);
        let g = gen::random_multigraph(n, m, &mut rng);
        let rc = gen::random_rc_params(&g, (0.0, 1.0), (0.0, 1.0), &mut rng);
        let r = verify_sw_rc_convolution(&g, &rc).map_err(err)?;
        worst = worst.max(r.max_abs_err);
        if !r.holds(1e-10) {
            failures.push(format!("instance {i}: error {:e}", r.max_abs_err));
        }
    }
    Ok(Outcome {
        pass: failures.is_empty(),
        summary: format!("30 random instances (m ≤ 10), worst error {worst:.2e} (tol 1e-10)"),
        details: failures,
    })
}

fn dynconn_fuzz() -> Run {
    let mut details = Vec::new();
    let mut pass = true;
    for (n, m, every, seed) in [(10, 40, 1, 801), (100, 300, 50, 802), (1000, 1500, 500, 803)] {
        match support::run_script(n, m, 100_000, every, seed) {
            Ok(s) => details.push(format!(
                "n={n}: 1e5 ops, {} queries matched, worst log-aggregate relative error {:.2e}",
                s.queries, s.max_rel_err
            )),
            Err(e) => {
                pass = false;
                details.push(format!("n={n}: mismatch: {e}"));
            }
        }
    }
    Ok(Outcome { pass, summary: "scripts on n = 10, 100, 1000 against the naive oracle".into(), details })
}

/// Mean time of a toggle plus aggregate query on a random graph with
/// `m = 2n`, after a warm-up of the same length.
fn per_op_nanos(n: usize, ops: usize) -> f64 {
    let mut rng = stream_rng(809, n as u64);
    let g = gen::random_multigraph(n, 2 * n, &mut rng);
    let mut dc = DynConn::new(&vec![0.5; n], g.edges()).expect("valid instance");
    let mut present = vec![false; g.m()];
    let mut toggle = |dc: &mut DynConn, rng: &mut fieldsamp_core::rng::StreamRng| {
        let e = rng.random_range(0..g.m());
        if present[e] {
            dc.delete_edge(e).expect("present");
        } else {
            dc.insert_edge(e).expect("absent");
        }
        present[e] = !present[e];
        std::hint::black_box(dc.comp_lambda_product(rng.random_range(0..n)));
    };
    for _ in 0..ops {
        toggle(&mut dc, &mut rng);
    }
    let start = Instant::now();
    for _ in 0..ops {
        toggle(&mut dc, &mut rng);
    }
    start.elapsed().as_nanos() as f64 / ops as f64
}

fn dynconn_perf() -> (bool, String) {
    let small = per_op_nanos(1_000, 200_000);
    let large = per_op_nanos(100_000, 200_000);
    let ratio = large / small;
    (ratio <= 4.0, format!("per-op {small:.0} ns at n=1e3, {large:.0} ns at n=1e5, ratio {ratio:.2} (≤ 4)"))
}

fn schedule_formulas() -> Run {
    let mut details = Vec::new();
    let mut pass = true;
    let mut check = |what: String, ok: bool| {
        pass &= ok;
        details.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    };

    let s = schedule_paper(0.5, 0.5, 0.5, 100, 50).map_err(err)?;
    let k_direct = 1e-14 * 0.25 * (-112f64).exp();
    let k = s.ln_k().expect("paper mode").exp();
    check(format!("K(eps=0.5, lambda_max=0.5) = {k:.6e}, direct {k_direct:.6e}"), (k / k_direct - 1.0).abs() < 1e-12);
    check(
        format!("ln N0 at lambda_max=0.5 = {} (12 (1-0.5)^-2 = 48)", s.ln_n0().unwrap_or(f64::NAN)),
        s.ln_n0() == Some(48.0),
    );
    let t_gd = inner_steps(50, 0.5, 100f64.ln());
    let direct = (100.0 * (50f64.ln() + 400f64.ln())).ceil() as u64;
    check(format!("T_GD(T_FD=100, m=50, eps=0.5) = {t_gd}, direct {direct}, expected 991"), t_gd == 991 && direct == 991);

    // the full table over a grid, recomputed from the unsimplified formulas
    let mut worst: f64 = 0.0;
    for &eps in &[0.01, 0.1, 0.5, 0.9] {
        for &p_min in &[0.001, 0.3, 1.0] {
            for &lmax in &[0.0, 0.5, 0.9] {
                for &(n, m) in &[(2usize, 1usize), (100, 300), (1_000_000, 5_000_000)] {
                    let s = schedule_paper(eps, p_min, lmax, n, m).map_err(err)?;
                    let ln_n = (n as f64).ln();
                    let ln_k = (1e-14 * eps * eps).ln() - 28.0 / (1.0 - lmax).powi(2);
                    let ln_theta = ln_k + (p_min / ln_n).ln();
                    let exponent = 5.0 / (1.0 - lmax).powi(2);
                    let ln_t_fd = exponent * (1f64 - ln_theta)
                        + (2.0 * ln_n + (2.0 / p_min).ln().ln() + (2.0 / (eps * eps)).ln()).ln();
                    let ln_n0 = [12.0 / (1.0 - lmax).powi(2), (3.0 / p_min).ln(), (2.0 / (eps * eps)).ln().sqrt().ln()]
                        .into_iter()
                        .fold(f64::NEG_INFINITY, f64::max);
                    let t_gd = 2.0 * m as f64 * ((m as f64).ln() + (2.0 / eps).ln() + ln_t_fd);
                    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
                    let e = rel(s.ln_k().unwrap(), ln_k)
                        .max(rel(s.ln_theta(), ln_theta))
                        .max(rel(s.ln_t_fd(), ln_t_fd))
                        .max(rel(s.ln_n0().unwrap(), ln_n0))
                        .max(rel(s.t_gd() as f64, t_gd.ceil()));
                    worst = worst.max(e);
                }
            }
        }
    }
    check(format!("108-point grid, worst relative deviation {worst:.2e} (tol 1e-12)"), worst < 1e-12);
    Ok(Outcome { pass, summary: "paper schedule in log space".into(), details })
}

fn main() -> ExitCode {
    let mut ok = true;
    let secs = Duration::from_secs;
    ok &= criterion("1", "partition-identities", secs(10), partition_identities);
    ok &= criterion("2", "edwards-sokal-exactness", secs(30), es_exactness);
    ok &= criterion("3", "glauber-correctness", secs(60), glauber_correctness);
    ok &= criterion("4", "end-to-end-sampler-tv", secs(300), sampler_tv);
    ok &= criterion("5", "spectral-independence-bound", secs(60), influence_bound);
    ok &= criterion("6", "coupling-bounds", secs(300), coupling_bounds);
    ok &= criterion("7", "convolution-identity", secs(10), convolution);
    ok &= criterion("8", "dynamic-connectivity", secs(300), dynconn_fuzz);
    let (perf_ok, perf) = dynconn_perf();
    println!(
        "{} 8-perf dynamic-connectivity-scaling (soft, not counted toward the exit status): {perf}",
        if perf_ok { "PASS" } else { "FAIL" }
    );
    ok &= criterion("9", "schedule-formulas", secs(10), schedule_formulas);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
