//! Euler-tour forest over splay trees.
//!
//! Every vertex owns one node for its whole lifetime; every tree edge owns two
//! arc nodes (one per direction). A tree of the forest is stored as the cyclic
//! Euler tour of its arcs and vertex nodes, cut open at an arbitrary point and
//! kept in a splay tree keyed by tour position.

pub(crate) const NIL: u32 = u32::MAX;

/// Vertex node has non-tree edges stored at this level.
pub(crate) const FLAG_NONTREE: u8 = 1;
/// Arc node is the canonical arc of a tree edge whose level equals this level.
pub(crate) const FLAG_TREE: u8 = 2;

/// Vertex node has zero weight; never consulted through `sub`.
const FLAG_ZERO: u8 = 4;

#[derive(Clone, Copy, Debug)]
struct Node {
    parent: u32,
    child: [u32; 2],
    /// Number of vertex nodes in the subtree.
    size: u32,
    /// Zero-weight vertices in the subtree.
    zeros: u32,
    own: u8,
    sub: u8,
    /// Sum of the vertex `ln lambda` values over the subtree, zero-weight vertices excluded.
    logs: f64,
}

impl Node {
    const fn fresh(size: u32) -> Self {
        Node {
            parent: NIL,
            child: [NIL, NIL],
            size,
            zeros: 0,
            own: 0,
            sub: 0,
            logs: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct EulerForest {
    n: usize,
    nodes: Vec<Node>,
    /// Edge id owning each arc node, indexed by `id - n`.
    owners: Vec<u32>,
    free: Vec<u32>,
    /// `ln lambda` per vertex for the weighted forest, empty otherwise.
    vertex_log: Vec<f64>,
}

impl EulerForest {
    pub(crate) fn new(n: usize) -> Self {
        EulerForest {
            n,
            nodes: vec![Node::fresh(1); n],
            owners: Vec::new(),
            free: Vec::new(),
            vertex_log: Vec::new(),
        }
    }

    /// Forest tracking vertex weights; only the level-0 forest needs them.
    pub(crate) fn with_weights(vertex_zero: Vec<bool>, vertex_log: Vec<f64>) -> Self {
        let mut forest = Self::new(vertex_zero.len());
        for (node, (&zero, &log)) in forest.nodes.iter_mut().zip(vertex_zero.iter().zip(&vertex_log)) {
            if zero {
                node.own = FLAG_ZERO;
                node.zeros = 1;
            } else {
                node.logs = log;
            }
        }
        forest.vertex_log = vertex_log;
        forest
    }

    pub(crate) fn alloc_arc(&mut self, owner: u32) -> u32 {
        let id = match self.free.pop() {
            Some(id) => {
                self.nodes[id as usize] = Node::fresh(0);
                id
            }
            None => {
                self.nodes.push(Node::fresh(0));
                self.owners.push(NIL);
                (self.nodes.len() - 1) as u32
            }
        };
        self.owners[id as usize - self.n] = owner;
        id
    }

    pub(crate) fn free_arc(&mut self, id: u32) {
        debug_assert!(id as usize >= self.n);
        let node = &self.nodes[id as usize];
        debug_assert!(node.parent == NIL && node.child == [NIL, NIL]);
        self.nodes[id as usize] = Node::fresh(0);
        self.owners[id as usize - self.n] = NIL;
        self.free.push(id);
    }

    pub(crate) fn owner(&self, id: u32) -> u32 {
        self.owners[id as usize - self.n]
    }

    #[inline]
    fn update(&mut self, x: u32) {
        let xi = x as usize;
        let node = self.nodes[xi];
        let vertex = xi < self.n;
        let mut size = vertex as u32;
        let mut sub = node.own;
        let mut zeros = (node.own & FLAG_ZERO != 0) as u32;
        let mut logs = match self.vertex_log.get(xi) {
            Some(&log) if zeros == 0 => log,
            _ => 0.0,
        };
        for c in node.child {
            if c != NIL {
                let cn = &self.nodes[c as usize];
                size += cn.size;
                sub |= cn.sub;
                zeros += cn.zeros;
                logs += cn.logs;
            }
        }
        let node = &mut self.nodes[xi];
        node.size = size;
        node.sub = sub;
        node.zeros = zeros;
        node.logs = logs;
    }

    #[inline]
    fn side(&self, x: u32) -> usize {
        let p = self.nodes[x as usize].parent;
        (self.nodes[p as usize].child[1] == x) as usize
    }

    fn rotate(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent;
        let g = self.nodes[p as usize].parent;
        let dir = self.side(x);
        let b = self.nodes[x as usize].child[1 - dir];

        self.nodes[p as usize].child[dir] = b;
        if b != NIL {
            self.nodes[b as usize].parent = p;
        }
        self.nodes[x as usize].child[1 - dir] = p;
        self.nodes[p as usize].parent = x;
        self.nodes[x as usize].parent = g;
        if g != NIL {
            let gs = (self.nodes[g as usize].child[1] == p) as usize;
            self.nodes[g as usize].child[gs] = x;
        }
        self.update(p);
        self.update(x);
    }

    pub(crate) fn splay(&mut self, x: u32) {
        loop {
            let p = self.nodes[x as usize].parent;
            if p == NIL {
                break;
            }
            let g = self.nodes[p as usize].parent;
            if g != NIL {
                if self.side(x) == self.side(p) {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    fn detach(&mut self, x: u32, dir: usize) -> u32 {
        let c = self.nodes[x as usize].child[dir];
        if c != NIL {
            self.nodes[x as usize].child[dir] = NIL;
            self.nodes[c as usize].parent = NIL;
            self.update(x);
        }
        c
    }

    /// Concatenates two sequences given by their roots (or `NIL`).
    fn join(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let mut r = a;
        while self.nodes[r as usize].child[1] != NIL {
            r = self.nodes[r as usize].child[1];
        }
        self.splay(r);
        self.nodes[r as usize].child[1] = b;
        self.nodes[b as usize].parent = r;
        self.update(r);
        r
    }

    /// Rotates the tour of `v`'s tree so it starts at `v`; returns the new root.
    fn reroot(&mut self, v: u32) -> u32 {
        self.splay(v);
        let left = self.detach(v, 0);
        self.join(v, left)
    }

    pub(crate) fn same_tree(&mut self, x: u32, y: u32) -> bool {
        if x == y {
            return true;
        }
        self.splay(x);
        let mut r = y;
        while self.nodes[r as usize].parent != NIL {
            r = self.nodes[r as usize].parent;
        }
        self.splay(y);
        r == x
    }

    pub(crate) fn tree_size(&mut self, x: u32) -> u32 {
        self.splay(x);
        self.nodes[x as usize].size
    }

    /// `(zero count, log sum)` over the vertices of `x`'s tree.
    pub(crate) fn tree_weight(&mut self, x: u32) -> (u32, f64) {
        debug_assert!(!self.vertex_log.is_empty() || self.n == 0, "weights are only tracked on the level-0 forest");
        self.splay(x);
        let node = &self.nodes[x as usize];
        (node.zeros, node.logs)
    }

    /// Joins the trees of `u` and `v` with a new tree edge whose arcs are `uv` and `vu`.
    pub(crate) fn link(&mut self, u: u32, v: u32, uv: u32, vu: u32) {
        let tu = self.reroot(u);
        let tv = self.reroot(v);
        let t = self.join(tu, uv);
        let t = self.join(t, tv);
        self.join(t, vu);
    }

    /// Removes the tree edge with arcs `a` and `b`, leaving both arcs isolated.
    pub(crate) fn cut(&mut self, a: u32, b: u32) {
        self.splay(a);
        let mut node = b;
        let mut from = NIL;
        while node != a {
            from = node;
            node = self.nodes[node as usize].parent;
            debug_assert!(node != NIL, "arcs of one edge must share a tour");
        }
        let b_first = self.nodes[a as usize].child[0] == from;
        self.splay(b);
        let (first, second) = if b_first { (b, a) } else { (a, b) };

        self.splay(first);
        let before = self.detach(first, 0);
        self.splay(second);
        let after = self.detach(second, 1);
        self.detach(second, 0);
        self.splay(first);
        self.detach(first, 1);
        self.join(after, before);
    }

    pub(crate) fn set_flag(&mut self, x: u32, bit: u8, on: bool) {
        self.splay(x);
        let node = &mut self.nodes[x as usize];
        if on {
            node.own |= bit;
        } else {
            node.own &= !bit;
        }
        self.update(x);
    }

    /// Finds some node in `x`'s tree carrying `bit`, splaying it to the root.
    pub(crate) fn find_flagged(&mut self, x: u32, bit: u8) -> Option<u32> {
        self.splay(x);
        if self.nodes[x as usize].sub & bit == 0 {
            return None;
        }
        let mut cur = x;
        loop {
            let node = &self.nodes[cur as usize];
            if node.own & bit != 0 {
                break;
            }
            let [l, r] = node.child;
            cur = if l != NIL && self.nodes[l as usize].sub & bit != 0 {
                l
            } else {
                r
            };
        }
        self.splay(cur);
        Some(cur)
    }

    /// Root node of each vertex's tree, without restructuring.
    pub(crate) fn vertex_roots(&self) -> Vec<u32> {
        let mut root = vec![NIL; self.nodes.len()];
        let mut path = Vec::new();
        for v in 0..self.n as u32 {
            let mut cur = v;
            while root[cur as usize] == NIL && self.nodes[cur as usize].parent != NIL {
                path.push(cur);
                cur = self.nodes[cur as usize].parent;
            }
            let r = if root[cur as usize] == NIL { cur } else { root[cur as usize] };
            root[cur as usize] = r;
            for x in path.drain(..) {
                root[x as usize] = r;
            }
        }
        root.truncate(self.n);
        root
    }
}
