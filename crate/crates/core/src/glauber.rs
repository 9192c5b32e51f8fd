//! Single-edge Glauber dynamics for the random-cluster model on an active
//! edge set `S`, backed by dynamic connectivity.
//!
//! For an edge `e = (u, v)` let `C_u`, `C_v` be the components of `u`, `v` in
//! `(V, X ∖ {e})` and `a = lambda^{C_u}`, `b = lambda^{C_v}`. The conditional
//! probability that `e ∈ X` given the rest is `p_e` when `C_u = C_v` and
//!
//! ```text
//! p_e (1 + ab) / ((1 + ab) + (1 - p_e)(a + b))
//! ```
//!
//! otherwise, which is the ratio `w(X ∪ e) / (w(X ∪ e) + w(X ∖ e))` of the
//! random-cluster weights.
//!
//! When every `lambda_v <= 1` the weights satisfy `a + b <= 1 + ab`, so the
//! conditional lies in `[p_e / (2 - p_e), p_e]`. A step draws its uniform
//! first and only consults the connectivity structure when the draw falls
//! inside that band.

use crate::error::{invalid, Result};
use crate::model::{EdgeConfig, Graph, RcParams};
use fieldsamp_dynconn::{ComponentWeight, DynConn};
use rand::Rng;

/// Conditional inclusion probability of an edge with parameter `p` whose
/// endpoints lie in components with weights `a`, `b` of `(V, X ∖ {e})`.
pub fn conditional_inclusion(p: f64, a: ComponentWeight, b: ComponentWeight, same_component: bool) -> f64 {
    if same_component {
        return p;
    }
    let (va, vb) = (a.value(), b.value());
    let ab = if a.is_zero() || b.is_zero() { 0.0 } else { (a.log_sum + b.log_sum).exp() };
    p * (1.0 + ab) / ((1.0 + ab) + (1.0 - p) * (va + vb))
}

/// Steps sufficient for mixing within `eps` from the full configuration,
/// `⌈2m(ln m + ln(2/eps))⌉`.
pub fn glauber_steps(m: usize, eps: f64) -> u64 {
    glauber_steps_ln(m, eps.ln())
}

/// [`glauber_steps`] with `eps` given as `ln eps`, saturating at `u64::MAX`.
pub fn glauber_steps_ln(m: usize, ln_eps: f64) -> u64 {
    if m == 0 {
        return 0;
    }
    let m = m as f64;
    let steps = (2.0 * m * (m.ln() + std::f64::consts::LN_2 - ln_eps)).ceil();
    if steps >= u64::MAX as f64 {
        u64::MAX
    } else {
        steps.max(0.0) as u64
    }
}

/// Chain state: active set `S`, edge probabilities, and the current
/// configuration `X ⊆ S` held in a connectivity structure whose edge set is
/// always exactly `X`.
#[derive(Clone, Debug)]
pub struct GlauberState {
    p: Vec<f64>,
    active: Vec<usize>,
    in_active: Vec<bool>,
    /// All `lambda_v <= 1`, so the conditional is bracketed by `p_e / (2 - p_e)` and `p_e`.
    bracketed: bool,
    conn: DynConn,
}

impl GlauberState {
    /// Chain on the full edge set started from `X = E`.
    pub fn new(g: &Graph, params: &RcParams) -> Result<Self> {
        let params = params.clone().for_graph(g)?;
        let mut conn = DynConn::new(params.lambda(), g.edges())?;
        for e in 0..g.m() {
            conn.insert_edge(e)?;
        }
        Ok(GlauberState {
            p: params.p().to_vec(),
            active: (0..g.m()).collect(),
            in_active: vec![true; g.m()],
            bracketed: params.lambda_max() <= 1.0,
            conn,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.p.len()
    }

    pub fn active_edges(&self) -> &[usize] {
        &self.active
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    /// Restricts the chain to `active` with edge probabilities `p` (indexed by
    /// edge id) and restarts it from `X = active`.
    pub fn activate(&mut self, active: &EdgeConfig, p: &[f64]) -> Result<()> {
        let m = self.p.len();
        if active.ground_size() != m || p.len() != m {
            return Err(invalid("active set or probability vector does not match the edge count"));
        }
        if let Some(x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(crate::error::domain(format!("edge probability must lie in [0, 1], got {x}")));
        }
        self.p.copy_from_slice(p);
        self.active.clear();
        for e in 0..m {
            let on = active.contains(e);
            self.in_active[e] = on;
            if on {
                self.active.push(e);
            }
            match (on, self.conn.contains(e)) {
                (true, false) => self.conn.insert_edge(e)?,
                (false, true) => self.conn.delete_edge(e)?,
                _ => {}
            }
        }
        Ok(())
    }

    /// Overwrites the current configuration; `x` must lie inside the active set.
    pub fn set_config(&mut self, x: &EdgeConfig) -> Result<()> {
        if x.ground_size() != self.p.len() {
            return Err(invalid("configuration does not match the edge count"));
        }
        if let Some(e) = x.ids().find(|&e| !self.in_active[e]) {
            return Err(invalid(format!("edge {e} is outside the active set")));
        }
        for e in 0..self.p.len() {
            match (x.contains(e), self.conn.contains(e)) {
                (true, false) => self.conn.insert_edge(e)?,
                (false, true) => self.conn.delete_edge(e)?,
                _ => {}
            }
        }
        Ok(())
    }

    pub fn config(&self) -> EdgeConfig {
        EdgeConfig::from_bools((0..self.p.len()).map(|e| self.conn.contains(e)).collect())
    }

    pub fn contains(&self, e: usize) -> bool {
        self.conn.contains(e)
    }

    /// Inclusion probability of `e` given `X ∖ {e}`; `e` must not be in `X`.
    fn probability_without(&mut self, e: usize) -> f64 {
        let (u, v) = self.conn.endpoints(e);
        if self.conn.connected(u, v) {
            return self.p[e];
        }
        let a = self.conn.comp_lambda_product(u);
        let b = self.conn.comp_lambda_product(v);
        conditional_inclusion(self.p[e], a, b, false)
    }

    /// Probability that one update of `e` leaves `e ∈ X`.
    pub fn transition_probability(&mut self, e: usize) -> Result<f64> {
        if e >= self.p.len() || !self.in_active[e] {
            return Err(invalid(format!("edge {e} is not in the active set")));
        }
        if self.conn.contains(e) {
            self.conn.delete_edge(e)?;
            let q = self.probability_without(e);
            self.conn.insert_edge(e)?;
            Ok(q)
        } else {
            Ok(self.probability_without(e))
        }
    }

    /// Resamples one uniformly chosen active edge from its conditional law.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if self.active.is_empty() {
            return;
        }
        let e = self.active[rng.random_range(0..self.active.len())];
        let r = rng.random::<f64>();
        let p = self.p[e];
        let present = self.conn.contains(e);
        if r >= p {
            // the conditional never exceeds p_e
            if present {
                self.conn.delete_edge(e).expect("edge is present");
            }
            return;
        }
        if self.bracketed && r < p / (2.0 - p) {
            if !present {
                self.conn.insert_edge(e).expect("edge is absent");
            }
            return;
        }
        if present && !self.conn.is_tree_edge(e) {
            // the endpoints stay connected without e, so the conditional is p_e
            return;
        }
        if present {
            self.conn.delete_edge(e).expect("edge is present");
        }
        if r < self.probability_without(e) {
            self.conn.insert_edge(e).expect("edge is absent");
        }
    }

    pub fn run<R: Rng + ?Sized>(&mut self, steps: u64, rng: &mut R) {
        for _ in 0..steps {
            self.step(rng);
        }
    }
}

/// Runs `steps` Glauber updates on all of `g` from `X = E` and returns `X`.
pub fn resample<R: Rng + ?Sized>(g: &Graph, params: &RcParams, steps: u64, rng: &mut R) -> Result<EdgeConfig> {
    let mut state = GlauberState::new(g, params)?;
    state.run(steps, rng);
    Ok(state.config())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumerate_rc;
    use crate::gen;
    use crate::model::{rc_weight, Subset};
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    #[test]
    fn k2_from_empty_matches_weight_ratio() {
        let g = gen::complete(2);
        let rc = RcParams::new(vec![0.8], vec![0.5, 0.5]).unwrap();
        let mut s = GlauberState::new(&g, &rc).unwrap();
        s.set_config(&Subset::empty(1)).unwrap();
        let q = s.transition_probability(0).unwrap();
        // w({e}) = 0.8 * 1.25, w(∅) = 0.2 * 1.5 * 1.5
        assert!((q - 1.0 / 1.45).abs() < 1e-12, "{q}");
        assert!((q - 0.8 * 1.25 / (0.8 * 1.25 + 0.2 * 2.25)).abs() < 1e-12);
    }

    #[test]
    fn closed_cycle_uses_p() {
        let g = gen::complete(3);
        let rc = RcParams::new(vec![0.3, 0.6, 0.9], vec![0.5; 3]).unwrap();
        let mut s = GlauberState::new(&g, &rc).unwrap();
        s.set_config(&Subset::from_ids(3, [1, 2]).unwrap()).unwrap();
        assert!((s.transition_probability(0).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(s.config(), Subset::from_ids(3, [1, 2]).unwrap());
    }

    #[test]
    fn zero_fields_reduce_to_p() {
        let g = gen::path(3);
        let rc = RcParams::new(vec![0.7, 0.4], vec![0.0; 3]).unwrap();
        let mut s = GlauberState::new(&g, &rc).unwrap();
        s.set_config(&Subset::empty(2)).unwrap();
        assert!((s.transition_probability(0).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn step_counts() {
        assert_eq!(glauber_steps(4, 0.5), 23);
        assert_eq!(glauber_steps(0, 0.5), 0);
        assert_eq!(glauber_steps(50, 0.5 / 100.0), 991);
    }

    #[test]
    fn zero_steps_return_the_active_set() {
        let g = gen::cycle(5);
        let rc = RcParams::new(vec![0.5; 5], vec![0.5; 5]).unwrap();
        let mut rng = stream_rng(3, 0);
        assert_eq!(resample(&g, &rc, 0, &mut rng).unwrap(), Subset::full(5));
    }

    #[test]
    fn k2_unit_fields_frequency() {
        // with a single edge every update is an exact resample of the whole state
        let g = gen::complete(2);
        let rc = RcParams::new(vec![0.5], vec![1.0, 1.0]).unwrap();
        let mut rng = stream_rng(5, 0);
        let runs = 100_000;
        let empty = (0..runs)
            .filter(|_| resample(&g, &rc, 10, &mut rng).unwrap().is_empty())
            .count() as f64
            / runs as f64;
        assert!((empty - 2.0 / 3.0).abs() < 0.01, "{empty}");
    }

    #[test]
    fn activation_restricts_updates() {
        let g = gen::cycle(4);
        let rc = RcParams::new(vec![0.5; 4], vec![0.5; 4]).unwrap();
        let mut s = GlauberState::new(&g, &rc).unwrap();
        let active = Subset::from_ids(4, [0, 2]).unwrap();
        s.activate(&active, &[0.9; 4]).unwrap();
        assert_eq!(s.config(), active);
        let mut rng = stream_rng(9, 0);
        for _ in 0..200 {
            s.step(&mut rng);
            assert!(!s.contains(1) && !s.contains(3));
        }
        assert!(s.transition_probability(1).is_err());
        assert!(s.set_config(&Subset::from_ids(4, [1]).unwrap()).is_err());
    }

    #[test]
    fn single_step_frequency_matches_conditional() {
        // the conditional 1/1.45 lies strictly inside [p / (2 - p), p]
        let g = gen::complete(2);
        let rc = RcParams::new(vec![0.8], vec![0.5, 0.5]).unwrap();
        let mut s = GlauberState::new(&g, &rc).unwrap();
        let mut rng = stream_rng(17, 0);
        let runs = 100_000;
        for start in [Subset::empty(1), Subset::full(1)] {
            let mut hits = 0;
            for _ in 0..runs {
                s.set_config(&start).unwrap();
                s.step(&mut rng);
                hits += usize::from(s.contains(0));
            }
            let freq = hits as f64 / runs as f64;
            assert!((freq - 1.0 / 1.45).abs() < 0.006, "{freq}");
        }
    }

    fn instance() -> impl Strategy<Value = (Graph, RcParams)> {
        (2usize..6, 1usize..8, any::<u64>()).prop_map(|(n, m, seed)| {
            let mut rng = stream_rng(seed, 1);
            let g = gen::random_multigraph(n, m, &mut rng);
            let rc = gen::random_rc_params(&g, (0.0, 1.0), (0.0, 1.0), &mut rng);
            (g, rc)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn transition_matches_weight_ratio((g, rc) in instance()) {
            let m = g.m();
            let mut s = GlauberState::new(&g, &rc).unwrap();
            for x in 0..1u64 << m {
                let cfg = Subset::from_mask(m, x);
                s.set_config(&cfg).unwrap();
                for e in 0..m {
                    let mut with = cfg.clone();
                    with.set(e, true);
                    let mut without = cfg.clone();
                    without.set(e, false);
                    let wi = rc_weight(&g, &rc, &with).unwrap().value();
                    let wo = rc_weight(&g, &rc, &without).unwrap().value();
                    if wi + wo > 0.0 {
                        let q = s.transition_probability(e).unwrap();
                        prop_assert!((q - wi / (wi + wo)).abs() < 1e-10, "x={x:b} e={e} {q} vs {}", wi / (wi + wo));
                    }
                }
            }
        }

        #[test]
        fn conditional_is_bracketed_for_unit_fields((g, rc) in instance()) {
            let m = g.m();
            let mut s = GlauberState::new(&g, &rc).unwrap();
            for x in 0..1u64 << m {
                s.set_config(&Subset::from_mask(m, x)).unwrap();
                for e in 0..m {
                    let p = rc.p()[e];
                    let q = s.transition_probability(e).unwrap();
                    prop_assert!(q <= p + 1e-15 && q >= p / (2.0 - p) - 1e-15, "{q} outside [{}, {p}]", p / (2.0 - p));
                }
            }
        }

        #[test]
        fn high_probability_edges_stay(n in 3usize..7, m in 1usize..8, seed in any::<u64>(), k in 0.0f64..(1.0 / 27.0)) {
            let mut rng = stream_rng(seed, 2);
            let g = gen::random_multigraph(n, m, &mut rng);
            let p = 1.0 - k / (n as f64).ln();
            let rc = gen::random_rc_params(&g, (p, p), (0.0, 1.0), &mut rng);
            let mut s = GlauberState::new(&g, &rc).unwrap();
            for x in 0..1u64 << m {
                s.set_config(&Subset::from_mask(m, x)).unwrap();
                for e in 0..m {
                    prop_assert!(s.transition_probability(e).unwrap() >= 1.0 - 3.0 * k - 1e-15);
                }
            }
        }

        #[test]
        fn chain_preserves_stationary_vector((g, rc) in instance()) {
            let m = g.m();
            let mu = enumerate_rc(&g, &rc).unwrap();
            let mut s = GlauberState::new(&g, &rc).unwrap();
            let mut next = vec![0.0f64; 1 << m];
            for x in 0..1u64 << m {
                s.set_config(&Subset::from_mask(m, x)).unwrap();
                for e in 0..m {
                    let q = s.transition_probability(e).unwrap();
                    let mass = mu.prob(x) / m as f64;
                    next[(x | 1 << e) as usize] += mass * q;
                    next[(x & !(1 << e)) as usize] += mass * (1.0 - q);
                }
            }
            for (a, b) in next.iter().zip(mu.probs()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
