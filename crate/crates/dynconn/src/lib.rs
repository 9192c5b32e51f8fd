//! Fully-dynamic connectivity over a fixed vertex set with per-component
//! aggregates of static vertex weights.
//!
//! The structure follows the leveled spanning-forest scheme of Holm, de
//! Lichtenberg and Thorup: every present edge carries a level, the forest
//! `F_i` of tree edges with level `>= i` is kept as an Euler-tour forest, and
//! trees of `F_i` never hold more than `n / 2^i` vertices. Deleting a tree
//! edge searches for a replacement from the highest level downwards, pushing
//! scanned edges one level up. Updates and queries cost `O(log^2 n)`
//! amortized.
//!
//! Vertex weights `lambda_v >= 0` are aggregated in log space on the level-0
//! forest. Zero weights are counted separately, so a component containing a
//! zero-weight vertex reports a zero product exactly.
//!
//! Candidate edges are declared up front by their endpoints; the edge set `X`
//! is then changed by edge id.

mod euler;

use euler::{EulerForest, FLAG_NONTREE, FLAG_TREE};
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynConnError {
    #[error("edge {0} is not a declared edge")]
    UnknownEdge(usize),
    #[error("edge {0} is already present")]
    AlreadyPresent(usize),
    #[error("edge {0} is not present")]
    NotPresent(usize),
    #[error("edge {edge} has endpoint {vertex} outside 0..{n}")]
    BadEndpoint { edge: usize, vertex: usize, n: usize },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("vertex weight {value} at vertex {vertex} is not a finite nonnegative number")]
    BadWeight { vertex: usize, value: f64 },
}

/// Product of vertex weights over a component, `0` when `zero_count > 0`
/// and `exp(log_sum)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentWeight {
    /// Number of zero-weight vertices in the component.
    pub zero_count: u32,
    /// Sum of `ln lambda_v` over the nonzero-weight vertices.
    pub log_sum: f64,
}

impl ComponentWeight {
    pub fn is_zero(&self) -> bool {
        self.zero_count > 0
    }

    /// `ln` of the product, `-inf` for a zero product.
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.log_sum
        }
    }

    pub fn value(&self) -> f64 {
        self.ln().exp()
    }
}

#[derive(Clone, Debug, Default)]
struct EdgeState {
    present: bool,
    tree: bool,
    level: usize,
    /// Arc pair per level `0..=level` while the edge is a tree edge.
    arcs: Vec<[u32; 2]>,
    /// Positions in the endpoint non-tree lists while the edge is non-tree.
    slot: [usize; 2],
}

#[derive(Clone, Debug)]
struct Level {
    forest: EulerForest,
    nontree: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct DynConn {
    n: usize,
    endpoints: Vec<(u32, u32)>,
    edges: Vec<EdgeState>,
    levels: Vec<Level>,
    present: usize,
}

impl DynConn {
    /// Builds an empty edge set over `n = lambda.len()` vertices with the
    /// given candidate edges.
    pub fn new(lambda: &[f64], endpoints: &[(usize, usize)]) -> Result<Self, DynConnError> {
        let n = lambda.len();
        let mut ends = Vec::with_capacity(endpoints.len());
        for (edge, &(u, v)) in endpoints.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(DynConnError::BadEndpoint { edge, vertex: w, n });
                }
            }
            if u == v {
                return Err(DynConnError::SelfLoop(edge));
            }
            ends.push((u as u32, v as u32));
        }
        let mut zero = Vec::with_capacity(n);
        let mut log = Vec::with_capacity(n);
        for (vertex, &value) in lambda.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(DynConnError::BadWeight { vertex, value });
            }
            zero.push(value == 0.0);
            log.push(if value > 0.0 { value.ln() } else { 0.0 });
        }
        let level0 = Level {
            forest: EulerForest::with_weights(zero, log),
            nontree: vec![Vec::new(); n],
        };
        Ok(DynConn {
            n,
            endpoints: ends,
            edges: vec![EdgeState::default(); endpoints.len()],
            levels: vec![level0],
            present: 0,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of declared candidate edges.
    pub fn edge_capacity(&self) -> usize {
        self.endpoints.len()
    }

    /// Number of edges currently in `X`.
    pub fn len(&self) -> usize {
        self.present
    }

    pub fn is_empty(&self) -> bool {
        self.present == 0
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.get(e).is_some_and(|s| s.present)
    }

    /// Whether present edge `e` is a spanning-forest edge. A present
    /// non-tree edge joins two vertices that stay connected without it.
    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.edges.get(e).is_some_and(|s| s.present && s.tree)
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (u, v) = self.endpoints[e];
        (u as usize, v as usize)
    }

    pub fn insert_edge(&mut self, e: usize) -> Result<(), DynConnError> {
        let state = self.edges.get(e).ok_or(DynConnError::UnknownEdge(e))?;
        if state.present {
            return Err(DynConnError::AlreadyPresent(e));
        }
        let (u, v) = self.endpoints[e];
        self.edges[e].present = true;
        self.edges[e].level = 0;
        self.present += 1;
        if self.levels[0].forest.same_tree(u, v) {
            self.add_nontree(e, 0);
        } else {
            self.make_tree(e, 0);
        }
        Ok(())
    }

    pub fn delete_edge(&mut self, e: usize) -> Result<(), DynConnError> {
        let state = self.edges.get(e).ok_or(DynConnError::UnknownEdge(e))?;
        if !state.present {
            return Err(DynConnError::NotPresent(e));
        }
        let (tree, top) = (state.tree, state.level);
        self.present -= 1;
        if !tree {
            self.remove_nontree(e);
            self.edges[e].present = false;
            return Ok(());
        }

        let arcs = std::mem::take(&mut self.edges[e].arcs);
        for (i, [a, b]) in arcs.into_iter().enumerate() {
            let forest = &mut self.levels[i].forest;
            forest.cut(a, b);
            forest.free_arc(a);
            forest.free_arc(b);
        }
        self.edges[e].tree = false;
        self.edges[e].present = false;

        let (u, v) = self.endpoints[e];
        for i in (0..=top).rev() {
            if self.replace(u, v, i) {
                break;
            }
        }
        Ok(())
    }

    pub fn connected(&mut self, u: usize, v: usize) -> bool {
        self.levels[0].forest.same_tree(u as u32, v as u32)
    }

    /// `prod_{j in C_u} lambda_j` for the component `C_u` of `u`.
    pub fn comp_lambda_product(&mut self, u: usize) -> ComponentWeight {
        let (zero_count, log_sum) = self.levels[0].forest.tree_weight(u as u32);
        ComponentWeight { zero_count, log_sum }
    }

    pub fn comp_size(&mut self, u: usize) -> usize {
        self.levels[0].forest.tree_size(u as u32) as usize
    }

    /// Component label per vertex: the smallest vertex id of its component.
    pub fn component_labels(&self) -> Vec<usize> {
        let roots = self.levels[0].forest.vertex_roots();
        let mut label_of_root = std::collections::HashMap::new();
        roots
            .iter()
            .enumerate()
            .map(|(v, r)| *label_of_root.entry(*r).or_insert(v))
            .collect()
    }

    /// Debug dump: one line `vertex label` per vertex.
    pub fn write_dump<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (v, label) in self.component_labels().into_iter().enumerate() {
            writeln!(out, "{v} {label}")?;
        }
        Ok(())
    }

    fn ensure_level(&mut self, i: usize) {
        while self.levels.len() <= i {
            self.levels.push(Level {
                forest: EulerForest::new(self.n),
                nontree: vec![Vec::new(); self.n],
            });
        }
    }

    /// Links `e` into the forests of levels `0..=level` as a tree edge.
    fn make_tree(&mut self, e: usize, level: usize) {
        self.ensure_level(level);
        let (u, v) = self.endpoints[e];
        let mut arcs = Vec::with_capacity(level + 1);
        for i in 0..=level {
            let forest = &mut self.levels[i].forest;
            let a = forest.alloc_arc(e as u32);
            let b = forest.alloc_arc(e as u32);
            forest.link(u, v, a, b);
            arcs.push([a, b]);
        }
        self.levels[level].forest.set_flag(arcs[level][0], FLAG_TREE, true);
        let state = &mut self.edges[e];
        state.tree = true;
        state.level = level;
        state.arcs = arcs;
    }

    fn add_nontree(&mut self, e: usize, level: usize) {
        self.ensure_level(level);
        let (u, v) = self.endpoints[e];
        self.edges[e].tree = false;
        self.edges[e].level = level;
        for (side, x) in [u, v].into_iter().enumerate() {
            let list = &mut self.levels[level].nontree[x as usize];
            self.edges[e].slot[side] = list.len();
            list.push(e as u32);
            if list.len() == 1 {
                self.levels[level].forest.set_flag(x, FLAG_NONTREE, true);
            }
        }
    }

    fn remove_nontree(&mut self, e: usize) {
        let level = self.edges[e].level;
        let (u, v) = self.endpoints[e];
        for (side, x) in [u, v].into_iter().enumerate() {
            let idx = self.edges[e].slot[side];
            let list = &mut self.levels[level].nontree[x as usize];
            list.swap_remove(idx);
            if let Some(&moved) = list.get(idx) {
                let moved = moved as usize;
                let moved_side = (self.endpoints[moved].0 != x) as usize;
                self.edges[moved].slot[moved_side] = idx;
            }
            if list.is_empty() {
                self.levels[level].forest.set_flag(x, FLAG_NONTREE, false);
            }
        }
    }

    /// Searches level `i` for an edge reconnecting the trees of `u` and `v`.
    fn replace(&mut self, u: u32, v: u32, i: usize) -> bool {
        let forest = &mut self.levels[i].forest;
        let small = if forest.tree_size(u) <= forest.tree_size(v) { u } else { v };

        // Tree edges of level i in the smaller tree move up one level.
        while let Some(arc) = self.levels[i].forest.find_flagged(small, FLAG_TREE) {
            let f = self.levels[i].forest.owner(arc) as usize;
            self.levels[i].forest.set_flag(arc, FLAG_TREE, false);
            self.ensure_level(i + 1);
            let (a, b) = self.endpoints[f];
            let forest = &mut self.levels[i + 1].forest;
            let x = forest.alloc_arc(f as u32);
            let y = forest.alloc_arc(f as u32);
            forest.link(a, b, x, y);
            forest.set_flag(x, FLAG_TREE, true);
            let state = &mut self.edges[f];
            state.level = i + 1;
            state.arcs.push([x, y]);
        }

        while let Some(x) = self.levels[i].forest.find_flagged(small, FLAG_NONTREE) {
            while let Some(&f) = self.levels[i].nontree[x as usize].last() {
                let f = f as usize;
                let (a, b) = self.endpoints[f];
                let y = if a == x { b } else { a };
                self.remove_nontree(f);
                if self.levels[i].forest.same_tree(x, y) {
                    self.add_nontree(f, i + 1);
                } else {
                    self.make_tree(f, i);
                    return true;
                }
            }
        }
        false
    }

    #[cfg(test)]
    fn level_count(&self) -> usize {
        self.levels.len()
    }
}
