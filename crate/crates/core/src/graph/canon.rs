//! Canonical forms and isomorphism.
//!
//! Port graphs are locally rigid: once one vertex of a connected component
//! is mapped, every port leads to a uniquely determined neighbor. The
//! canonical form therefore only has to choose a starting vertex per
//! component. Color refinement narrows the choice to one invariant class;
//! ties within it are broken by trying every candidate and keeping the
//! least traversal code.
//!
//! [`is_isomorphic`] is an independent check that does not use refinement or
//! codes: it propagates a mapping port by port from every compatible start.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use sha2::{Digest, Sha256};

use super::{Endpoint, Graph, LeafKind, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Vertex {
    Node(NodeId),
    Leaf(super::LeafId),
}

/// Vertices are nodes and leaves; each has an ordered port list, and each
/// port points at `(neighbor vertex, neighbor port index)`.
struct Flat {
    vertices: Vec<Vertex>,
    label: Vec<String>,
    adj: Vec<Vec<(usize, u8)>>,
    loops: usize,
}

impl Flat {
    fn new(g: &Graph, with_leaf_names: bool) -> Self {
        let mut vertices = Vec::new();
        let mut label = Vec::new();
        let mut pos: HashMap<Vertex, usize> = HashMap::new();
        for (n, k) in g.nodes() {
            pos.insert(Vertex::Node(n), vertices.len());
            vertices.push(Vertex::Node(n));
            label.push(match k.coefficient() {
                Some(c) => format!("dilation:{c}"),
                None => k.tag().to_string(),
            });
        }
        for (l, leaf) in g.leaves() {
            pos.insert(Vertex::Leaf(l), vertices.len());
            vertices.push(Vertex::Leaf(l));
            let side = match leaf.kind {
                LeafKind::Input => "input",
                LeafKind::Output => "output",
            };
            label.push(if with_leaf_names { format!("{side}:{}", leaf.name) } else { side.to_string() });
        }
        let locate = |at: Endpoint| -> (usize, u8) {
            match at {
                Endpoint::Port(n, p) => {
                    let k = g.kind(n).expect("endpoint node exists");
                    let idx = k.ports().iter().position(|&q| q == p).expect("port exists");
                    (pos[&Vertex::Node(n)], idx as u8)
                }
                Endpoint::Input(l) | Endpoint::Output(l) => (pos[&Vertex::Leaf(l)], 0),
            }
        };
        let mut adj: Vec<Vec<(usize, u8)>> = vertices
            .iter()
            .map(|v| match v {
                Vertex::Node(n) => vec![(usize::MAX, 0); g.kind(*n).unwrap().ports().len()],
                Vertex::Leaf(_) => vec![(usize::MAX, 0)],
            })
            .collect();
        for (_, e) in g.edges() {
            let (a, pa) = locate(e.source);
            let (b, pb) = locate(e.target);
            adj[a][pa as usize] = (b, pb);
            adj[b][pb as usize] = (a, pa);
        }
        Flat { vertices, label, adj, loops: g.loop_count() }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &(w, _) in &self.adj[v] {
                    if w != usize::MAX && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    fn refine(&self) -> Vec<u64> {
        let hash = |x: &dyn Fn(&mut DefaultHasher)| {
            let mut h = DefaultHasher::new();
            x(&mut h);
            h.finish()
        };
        let mut colors: Vec<u64> = self.label.iter().map(|l| hash(&|h| l.hash(h))).collect();
        let mut classes = distinct(&colors);
        loop {
            let next: Vec<u64> = (0..colors.len())
                .map(|v| {
                    hash(&|h| {
                        colors[v].hash(h);
                        for &(w, p) in &self.adj[v] {
                            (w != usize::MAX).then(|| colors[w]).hash(h);
                            p.hash(h);
                        }
                    })
                })
                .collect();
            let n = distinct(&next);
            colors = next;
            if n <= classes {
                return colors;
            }
            classes = n;
        }
    }

    /// Port-ordered breadth-first traversal code from `start`.
    fn code(&self, comp_len: usize, start: usize) -> Vec<u8> {
        let mut order = Vec::with_capacity(comp_len);
        let mut index: HashMap<usize, u32> = HashMap::with_capacity(comp_len);
        index.insert(start, 0);
        order.push(start);
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &(w, _) in &self.adj[v] {
                if w != usize::MAX && !index.contains_key(&w) {
                    index.insert(w, order.len() as u32);
                    order.push(w);
                }
            }
        }
        let mut out = Vec::new();
        for &v in &order {
            let l = self.label[v].as_bytes();
            out.extend_from_slice(&(l.len() as u32).to_be_bytes());
            out.extend_from_slice(l);
            out.push(self.adj[v].len() as u8);
            for &(w, p) in &self.adj[v] {
                let wi = if w == usize::MAX { u32::MAX } else { index[&w] };
                out.extend_from_slice(&wi.to_be_bytes());
                out.push(p);
            }
        }
        out
    }

    fn canonical_form(&self) -> Vec<u8> {
        let colors = self.refine();
        let mut codes: Vec<Vec<u8>> = self
            .components()
            .into_iter()
            .map(|comp| {
                let mut count: BTreeMap<u64, usize> = BTreeMap::new();
                for &v in &comp {
                    *count.entry(colors[v]).or_default() += 1;
                }
                let (&chosen, _) = count.iter().min_by_key(|(c, n)| (**n, **c)).expect("components are non-empty");
                comp.iter()
                    .filter(|&&v| colors[v] == chosen)
                    .map(|&v| self.code(comp.len(), v))
                    .min()
                    .expect("chosen class is non-empty")
            })
            .collect();
        codes.sort();
        let mut out = format!("glc-canon/1;loops={};components={};", self.loops, codes.len()).into_bytes();
        for c in codes {
            out.extend_from_slice(&(c.len() as u32).to_be_bytes());
            out.extend_from_slice(&c);
        }
        out
    }
}

fn distinct(colors: &[u64]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Full canonical encoding (leaves unnamed). Equal iff isomorphic.
pub fn canonical_form(g: &Graph) -> Vec<u8> {
    Flat::new(g, false).canonical_form()
}

/// SHA-256 digest of the canonical form, leaves unnamed.
pub fn canonical_key(g: &Graph) -> Vec<u8> {
    Sha256::digest(canonical_form(g)).to_vec()
}

/// Like [`canonical_key`] but leaf names are part of the structure.
pub fn canonical_key_labeled(g: &Graph) -> Vec<u8> {
    Sha256::digest(Flat::new(g, true).canonical_form()).to_vec()
}

/// Stable refined color per node; equal colors are necessary for two nodes
/// to be exchanged by an automorphism.
pub fn refined_colors(g: &Graph) -> BTreeMap<NodeId, u64> {
    let flat = Flat::new(g, false);
    let colors = flat.refine();
    flat.vertices
        .iter()
        .zip(colors)
        .filter_map(|(v, c)| match v {
            Vertex::Node(n) => Some((*n, c)),
            Vertex::Leaf(_) => None,
        })
        .collect()
}

/// Isomorphism with unnumbered leaves.
pub fn is_isomorphic(a: &Graph, b: &Graph) -> bool {
    isomorphic(a, b, false)
}

/// Isomorphism that also matches leaf names.
pub fn is_isomorphic_labeled(a: &Graph, b: &Graph) -> bool {
    isomorphic(a, b, true)
}

fn isomorphic(a: &Graph, b: &Graph, labeled: bool) -> bool {
    if a.node_count() != b.node_count()
        || a.edge_count() != b.edge_count()
        || a.loop_count() != b.loop_count()
        || a.leaves().count() != b.leaves().count()
    {
        return false;
    }
    let fa = Flat::new(a, labeled);
    let fb = Flat::new(b, labeled);
    let ca = fa.components();
    let cb = fb.components();
    if ca.len() != cb.len() {
        return false;
    }
    let mut used = vec![false; cb.len()];
    'outer: for comp in &ca {
        let s = comp[0];
        for (j, other) in cb.iter().enumerate() {
            if used[j] || other.len() != comp.len() {
                continue;
            }
            for &t in other {
                if fb.label[t] == fa.label[s] && propagate(&fa, &fb, s, t, comp.len()) {
                    used[j] = true;
                    continue 'outer;
                }
            }
        }
        return false;
    }
    true
}

fn propagate(fa: &Flat, fb: &Flat, s: usize, t: usize, size: usize) -> bool {
    let mut fwd: HashMap<usize, usize> = HashMap::with_capacity(size);
    let mut back: HashMap<usize, usize> = HashMap::with_capacity(size);
    fwd.insert(s, t);
    back.insert(t, s);
    let mut stack = vec![(s, t)];
    while let Some((x, y)) = stack.pop() {
        if fa.label[x] != fb.label[y] || fa.adj[x].len() != fb.adj[y].len() {
            return false;
        }
        for (&(xn, xp), &(yn, yp)) in fa.adj[x].iter().zip(&fb.adj[y]) {
            if xp != yp || (xn == usize::MAX) != (yn == usize::MAX) {
                return false;
            }
            if xn == usize::MAX {
                continue;
            }
            match (fwd.get(&xn), back.get(&yn)) {
                (Some(&m), _) if m != yn => return false,
                (_, Some(&m)) if m != xn => return false,
                (Some(_), Some(_)) => {}
                _ => {
                    fwd.insert(xn, yn);
                    back.insert(yn, xn);
                    stack.push((xn, yn));
                }
            }
        }
    }
    fwd.len() == size
}
