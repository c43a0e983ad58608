use serde::{Deserialize, Serialize};

use super::scales::{ell_from_norm, product_norm, LengthScales, ProductNorm};
use crate::error::{CfsError, Result};
use crate::operator::{relate, CausalClass, CausalFermionSystem, PairRelation, TimeOrientation};
use crate::par::map_pairs;
use crate::spin::ConnectablePair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub scales: LengthScales,
    /// Only join spin-connectable pairs.
    #[serde(default)]
    pub require_spin_connectable: bool,
}

impl GraphConfig {
    pub fn new(scales: LengthScales) -> Self {
        Self {
            scales,
            require_spin_connectable: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub target: usize,
    pub weight: f64,
}

/// Directed graph of causal steps `u -> v` (v in the future of u, timelike,
/// nonzero length), with its strongly connected components.
#[derive(Debug, Clone)]
pub struct CausalGraph {
    ids: Vec<String>,
    adj: Vec<Vec<Edge>>,
    comp: Vec<usize>,
    comp_size: Vec<usize>,
    self_loop: Vec<bool>,
    /// Vertices ordered so that every edge between different components
    /// points forward.
    topo: Vec<usize>,
}

/// Relation, length-function norm and spin-connectability of one pair `i < j`.
#[derive(Debug, Clone)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub relation: PairRelation,
    pub norm: f64,
    pub connectable: Option<bool>,
}

/// Pair analysis for all `i < j` (row-major), computed in parallel.
pub fn pair_records(
    system: &CausalFermionSystem,
    norm: ProductNorm,
    with_connectability: bool,
) -> Result<Vec<PairRecord>> {
    let n = system.n();
    let tol = *system.tolerances();
    let out = map_pairs(system.len(), |i, j| -> Result<PairRecord> {
        let (x, y) = (system.operator(i), system.operator(j));
        let relation = relate(x, y, n, &tol)?;
        let norm = product_norm(x, y, n, norm)?;
        let connectable = with_connectability.then(|| ConnectablePair::new(x, y, n, &tol).is_ok());
        Ok(PairRecord {
            i,
            j,
            relation,
            norm,
            connectable,
        })
    });
    out.into_iter().collect()
}

pub fn build_causal_graph(
    system: &CausalFermionSystem,
    config: &GraphConfig,
) -> Result<CausalGraph> {
    config.scales.validate()?;
    let records = pair_records(system, config.scales.norm, config.require_spin_connectable)?;
    let mut edges = Vec::new();
    for r in &records {
        if r.relation.class != CausalClass::Timelike || r.connectable == Some(false) {
            continue;
        }
        let w = ell_from_norm(r.norm, &config.scales);
        if w <= 0.0 {
            continue;
        }
        match r.relation.orientation {
            TimeOrientation::Future => edges.push((r.i, r.j, w)),
            TimeOrientation::Past => edges.push((r.j, r.i, w)),
            TimeOrientation::Undirected => {}
        }
    }
    let ids = system.points().iter().map(|p| p.id.clone()).collect();
    CausalGraph::from_edges(ids, &edges)
}

impl CausalGraph {
    /// Graph on the given vertices from `(source, target, weight)` triples;
    /// weights must be positive and finite. Parallel edges keep the largest weight.
    pub fn from_edges(ids: Vec<String>, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let n = ids.len();
        let mut adj: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(CfsError::InvalidConfig(format!(
                    "edge ({u}, {v}) outside 0..{n}"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(CfsError::InvalidConfig(format!(
                    "edge ({u}, {v}) has weight {w}"
                )));
            }
            match adj[u].iter_mut().find(|e| e.target == v) {
                Some(e) => e.weight = e.weight.max(w),
                None => adj[u].push(Edge {
                    target: v,
                    weight: w,
                }),
            }
        }
        for list in &mut adj {
            list.sort_by_key(|e| e.target);
        }
        let self_loop = (0..n)
            .map(|u| adj[u].iter().any(|e| e.target == u))
            .collect();
        let (comp, count) = tarjan(&adj);
        let mut comp_size = vec![0; count];
        for &c in &comp {
            comp_size[c] += 1;
        }
        // Tarjan numbers components in reverse topological order
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&v| (std::cmp::Reverse(comp[v]), v));
        Ok(Self {
            ids,
            adj,
            comp,
            comp_size,
            self_loop,
            topo,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn edges_from(&self, u: usize) -> &[Edge] {
        &self.adj[u]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |e| (u, e.target, e.weight)))
    }

    pub fn component(&self, v: usize) -> usize {
        self.comp[v]
    }

    /// True if `v` lies on a closed causal chain.
    pub fn on_cycle(&self, v: usize) -> bool {
        self.comp_size[self.comp[v]] > 1 || self.self_loop[v]
    }

    /// Lorentzian distances from `x` to every vertex: the supremum of chain
    /// lengths (at least one step), 0 without a chain, infinity when some
    /// chain can pass through a closed chain.
    pub fn distances_from(&self, x: usize) -> Vec<f64> {
        let n = self.len();
        // best[v]: longest walk x ->* v with zero or more steps
        let mut best: Vec<Option<f64>> = vec![None; n];
        best[x] = Some(if self.on_cycle(x) { f64::INFINITY } else { 0.0 });
        let mut start = 0;
        while start < n {
            let c = self.comp[self.topo[start]];
            let mut end = start;
            while end < n && self.comp[self.topo[end]] == c {
                end += 1;
            }
            let members = &self.topo[start..end];
            start = end;
            if members.iter().all(|&u| best[u].is_none()) {
                continue;
            }
            // entering a closed chain anywhere reaches all of it, unboundedly
            if self.on_cycle(members[0]) {
                for &u in members {
                    best[u] = Some(f64::INFINITY);
                }
            }
            for &u in members {
                let Some(bu) = best[u] else { continue };
                for e in &self.adj[u] {
                    let cand = bu + e.weight;
                    if best[e.target].is_none_or(|b| cand > b) {
                        best[e.target] = Some(cand);
                    }
                }
            }
        }
        best.into_iter()
            .enumerate()
            .map(|(v, b)| match b {
                Some(d) if v != x || d.is_infinite() => d,
                _ => 0.0,
            })
            .collect()
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.distances_from(x)[y]
    }

    /// All-pairs distance matrix, rows in parallel.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        crate::par::map_range(self.len(), |x| self.distances_from(x))
    }

    /// Graphviz rendering; infinite-distance structure is not shown.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph causal {\n");
        for id in &self.ids {
            s.push_str(&format!("  \"{}\";\n", escape(id)));
        }
        for (u, v, w) in self.edges() {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{:.16e}\"];\n",
                escape(&self.ids[u]),
                escape(&self.ids[v]),
                w
            ));
        }
        s.push_str("}\n");
        s
    }
}

fn escape(id: &str) -> String {
    id.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Iterative Tarjan; returns the component of each vertex and the number of
/// components. Components are numbered in reverse topological order.
fn tarjan(adj: &[Vec<Edge>]) -> (Vec<usize>, usize) {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut count = 0;
    let mut next = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(e) = adj[v].get(*pos) {
                *pos += 1;
                let w = e.target;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }
    (comp, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn longest_of_two_routes() {
        let g = CausalGraph::from_edges(ids(3), &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.5)]).unwrap();
        assert_eq!(g.distance(0, 2), 2.0);
        assert_eq!(g.distance(2, 0), 0.0);
        assert_eq!(g.distance(0, 0), 0.0);
    }

    #[test]
    fn cycle_makes_distance_infinite() {
        let g = CausalGraph::from_edges(
            ids(4),
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 1, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        assert!(g.distance(0, 3).is_infinite());
        assert!(g.distance(1, 1).is_infinite());
        assert_eq!(g.distance(3, 0), 0.0);
        assert_eq!(g.distance(0, 0), 0.0);
    }

    #[test]
    fn empty_graph() {
        let g = CausalGraph::from_edges(ids(1), &[]).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.distance(0, 0), 0.0);
    }
}
