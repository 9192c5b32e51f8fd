//! Graph families and random parameter draws for tests, verification suites
//! and benchmarks.

use crate::model::{Graph, GswParams, IsingParams, RcParams};
use rand::Rng;

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n).map(|v| (v - 1, v)).collect()).expect("path is loop-free")
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "a cycle needs at least 3 vertices");
    Graph::new(n, (0..n).map(|v| (v, (v + 1) % n)).collect()).expect("cycle is loop-free")
}

pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::new(n, edges).expect("complete graph is loop-free")
}

pub fn star(leaves: usize) -> Graph {
    Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v)).collect()).expect("star is loop-free")
}

/// `m` edges with endpoints drawn uniformly among distinct pairs; parallel
/// edges may occur.
pub fn random_multigraph<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    assert!(n >= 2 || m == 0, "edges need two distinct vertices");
    let edges = (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect();
    Graph::new(n, edges).expect("generated edges are loop-free")
}

/// `m` distinct vertex pairs chosen uniformly.
pub fn random_simple_graph<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(m <= pairs.len(), "too many edges for a simple graph on {n} vertices");
    for i in 0..m {
        let j = rng.random_range(i..pairs.len());
        pairs.swap(i, j);
    }
    pairs.truncate(m);
    Graph::new(n, pairs).expect("generated edges are loop-free")
}

fn draw<R: Rng + ?Sized>(range: (f64, f64), rng: &mut R) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.random_range(range.0..range.1)
    }
}

pub fn random_ising_params<R: Rng + ?Sized>(g: &Graph, beta: (f64, f64), lambda: (f64, f64), rng: &mut R) -> IsingParams {
    let b: Vec<f64> = (0..g.m()).map(|_| draw(beta, rng)).collect();
    let l = (0..g.n()).map(|_| draw(lambda, rng)).collect();
    IsingParams::new(&b, l).expect("ranges are valid")
}

pub fn random_rc_params<R: Rng + ?Sized>(g: &Graph, p: (f64, f64), lambda: (f64, f64), rng: &mut R) -> RcParams {
    let p = (0..g.m()).map(|_| draw(p, rng)).collect();
    let l = (0..g.n()).map(|_| draw(lambda, rng)).collect();
    RcParams::new(p, l).expect("ranges are valid")
}

pub fn random_gsw_params<R: Rng + ?Sized>(g: &Graph, p: (f64, f64), eta: (f64, f64), rng: &mut R) -> GswParams {
    let p = (0..g.m()).map(|_| draw(p, rng)).collect();
    let e = (0..g.n()).map(|_| draw(eta, rng)).collect();
    let sigma = (0..g.n()).map(|_| rng.random_bool(0.5)).collect();
    GswParams::new(p, e, sigma).expect("ranges are valid")
}

/// Small named graphs used as the stock verification corpus.
pub fn corpus() -> Vec<(&'static str, Graph)> {
    vec![
        ("k2", complete(2)),
        ("path3", path(3)),
        ("triangle", complete(3)),
        ("double-edge", Graph::new(2, vec![(0, 1), (0, 1)]).unwrap()),
        ("star3", star(3)),
        ("cycle4", cycle(4)),
        ("path5", path(5)),
        ("k4", complete(4)),
        ("bowtie", Graph::new(5, vec![(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap()),
        ("cycle6", cycle(6)),
        ("theta", Graph::new(5, vec![(0, 1), (1, 4), (0, 2), (2, 4), (0, 3), (3, 4)]).unwrap()),
        ("isolated", Graph::new(4, vec![(0, 1), (0, 1), (1, 2)]).unwrap()),
    ]
}
