//! Naive connectivity oracle and randomized toggle scripts, shared by the
//! fuzz tests and the acceptance harness.

#![allow(dead_code)]

use fieldsamp_dynconn::DynConn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Recomputes components of `(V, X)` from scratch.
pub struct Naive {
    pub lambda: Vec<f64>,
    pub ends: Vec<(usize, usize)>,
    pub present: Vec<bool>,
}

impl Naive {
    pub fn components(&self) -> Vec<usize> {
        let n = self.lambda.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if self.present[e] {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
        (0..n).map(|v| find(&mut parent, v)).collect()
    }

    pub fn weight(&self, comp: &[usize], u: usize) -> (u32, f64) {
        let mut zeros = 0;
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for v in (0..comp.len()).filter(|&v| comp[v] == comp[u]) {
            if self.lambda[v] == 0.0 {
                zeros += 1;
            } else {
                // Kahan summation as the extended-precision reference.
                let y = self.lambda[v].ln() - c;
                let t = sum + y;
                c = (t - sum) - y;
                sum = t;
            }
        }
        (zeros, sum)
    }
}

pub fn random_instance(n: usize, m: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<(usize, usize)>) {
    let lambda = (0..n)
        .map(|_| if rng.random_bool(0.05) { 0.0 } else { rng.random_range(0.01..1.0) })
        .collect();
    let ends = (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    (lambda, ends)
}

/// Outcome of a script: queries compared and the worst relative error of
/// the log-aggregate.
#[derive(Clone, Copy, Debug)]
pub struct ScriptStats {
    pub queries: usize,
    pub max_rel_err: f64,
}

/// Toggles random edges and compares every query with the oracle. Returns
/// the first mismatch as an error.
pub fn run_script(n: usize, m: usize, ops: usize, full_check_every: usize, seed: u64) -> Result<ScriptStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lambda, ends) = random_instance(n, m, &mut rng);
    let mut dc = DynConn::new(&lambda, &ends).map_err(|e| e.to_string())?;
    let mut naive = Naive { lambda, ends, present: vec![false; m] };
    let mut stats = ScriptStats { queries: 0, max_rel_err: 0.0 };
    for step in 0..ops {
        let e = rng.random_range(0..m);
        let r = if naive.present[e] { dc.delete_edge(e) } else { dc.insert_edge(e) };
        r.map_err(|err| format!("step {step}: {err}"))?;
        naive.present[e] = !naive.present[e];
        if dc.len() != naive.present.iter().filter(|&&p| p).count() {
            return Err(format!("step {step}: edge count"));
        }

        let comp = naive.components();
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if dc.connected(u, v) != (comp[u] == comp[v]) {
            return Err(format!("step {step}: connected({u},{v})"));
        }
        let size = comp.iter().filter(|&&c| c == comp[u]).count();
        if dc.comp_size(u) != size {
            return Err(format!("step {step}: size({u})"));
        }
        let (zeros, log) = naive.weight(&comp, u);
        let w = dc.comp_lambda_product(u);
        if w.zero_count != zeros {
            return Err(format!("step {step}: zero count"));
        }
        let rel = (w.log_sum - log).abs() / log.abs().max(1.0);
        if rel > 1e-9 {
            return Err(format!("step {step}: log weight {} vs {log}", w.log_sum));
        }
        stats.max_rel_err = stats.max_rel_err.max(rel);
        stats.queries += 3;

        if step % full_check_every == 0 {
            let labels = dc.component_labels();
            for x in 0..n {
                for y in [0, x / 2, n - 1] {
                    if (labels[x] == labels[y]) != (comp[x] == comp[y]) {
                        return Err(format!("step {step}: labels of {x} and {y}"));
                    }
                    stats.queries += 1;
                }
            }
        }
    }
    Ok(stats)
}
