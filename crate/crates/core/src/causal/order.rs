use std::collections::BTreeSet;

use super::graph::CausalGraph;
use crate::error::{CfsError, Result};

/// Default and hard limits on the number of points for lattice enumeration.
pub const LATTICE_DEFAULT_CAP: usize = 20;
pub const LATTICE_HARD_CAP: usize = 64;

/// The causal order `x <= y` iff `x = y` or `d(x, y) > 0`, i.e. `y` is reachable
/// from `x` in one or more steps. Reflexive and transitive, not necessarily
/// antisymmetric.
#[derive(Debug, Clone)]
pub struct CausalOrder {
    leq: Vec<Vec<bool>>,
}

impl CausalOrder {
    pub fn from_graph(graph: &CausalGraph) -> Self {
        let n = graph.len();
        let leq = crate::par::map_range(n, |x| {
            let mut seen = vec![false; n];
            seen[x] = true;
            let mut stack = vec![x];
            while let Some(u) = stack.pop() {
                for e in graph.edges_from(u) {
                    if !seen[e.target] {
                        seen[e.target] = true;
                        stack.push(e.target);
                    }
                }
            }
            seen
        });
        Self { leq }
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    /// Neither `x <= y` nor `y <= x`.
    pub fn orthogonal(&self, x: usize, y: usize) -> bool {
        !self.leq[x][y] && !self.leq[y][x]
    }

    /// `A^perp = { x : x perp a for all a in A }`, sorted.
    pub fn ortho_complement(&self, a: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| a.iter().all(|&y| self.orthogonal(x, y)))
            .collect()
    }

    /// `{a}^perp` for every point, as bit masks (at most 64 points).
    pub fn perp_masks(&self) -> Result<Vec<u64>> {
        let n = self.len();
        if n > LATTICE_HARD_CAP {
            return Err(CfsError::SizeCap {
                size: n,
                cap: LATTICE_HARD_CAP,
            });
        }
        Ok((0..n)
            .map(|a| {
                (0..n)
                    .filter(|&x| self.orthogonal(x, a))
                    .fold(0u64, |m, x| m | 1 << x)
            })
            .collect())
    }
}

pub fn partial_order(x: usize, y: usize, graph: &CausalGraph) -> bool {
    x == y || graph.distance(x, y) > 0.0
}

pub fn ortho_complement(a: &[usize], graph: &CausalGraph) -> Vec<usize> {
    CausalOrder::from_graph(graph).ortho_complement(a)
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn mask_to_set(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn set_to_mask(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &i| m | 1 << i)
}

/// `A^perp` on bit masks.
pub fn perp_of_mask(perp: &[u64], a: u64) -> u64 {
    let mut out = full_mask(perp.len());
    for (i, p) in perp.iter().enumerate() {
        if a >> i & 1 == 1 {
            out &= p;
        }
    }
    out
}

/// The closed sets `A = A^{perp perp}`, ordered by size and then by members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub points: usize,
    pub masks: Vec<u64>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn sets(&self) -> Vec<Vec<usize>> {
        self.masks.iter().map(|&m| mask_to_set(m)).collect()
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.masks
            .binary_search_by(|m| order_key(*m).cmp(&order_key(mask)))
            .is_ok()
    }
}

fn order_key(m: u64) -> (u32, u64) {
    (m.count_ones(), !m.reverse_bits())
}

/// Every closed set is `B^perp = ∩_{b in B} {b}^perp`, so the lattice is the
/// closure of the generators `{b}^perp` under intersection, starting from
/// `M = ∅^perp`.
pub fn enumerate_lattice(graph: &CausalGraph, max_points: usize) -> Result<Lattice> {
    let n = graph.len();
    let cap = max_points.min(LATTICE_HARD_CAP);
    if n > cap {
        return Err(CfsError::SizeCap { size: n, cap });
    }
    let perp = CausalOrder::from_graph(graph).perp_masks()?;
    let mut seen = BTreeSet::new();
    let mut queue = vec![full_mask(n)];
    seen.insert(full_mask(n));
    while let Some(s) = queue.pop() {
        for &g in &perp {
            let t = s & g;
            if seen.insert(t) {
                queue.push(t);
            }
        }
    }
    let mut masks: Vec<u64> = seen.into_iter().collect();
    masks.sort_by_key(|&m| order_key(m));
    Ok(Lattice { points: n, masks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> CausalGraph {
        let ids = (0..n).map(|i| format!("v{i}")).collect();
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        CausalGraph::from_edges(ids, &e).unwrap()
    }

    #[test]
    fn comparable_pair() {
        let g = graph(2, &[(0, 1)]);
        assert!(partial_order(0, 1, &g));
        assert!(!partial_order(1, 0, &g));
        assert_eq!(ortho_complement(&[0], &g), Vec::<usize>::new());
        assert_eq!(ortho_complement(&[], &g), vec![0, 1]);
        assert_eq!(
            enumerate_lattice(&g, 20).unwrap().sets(),
            vec![vec![], vec![0, 1]]
        );
    }

    #[test]
    fn incomparable_pair() {
        let g = graph(2, &[]);
        assert_eq!(ortho_complement(&[0], &g), vec![1]);
        assert_eq!(
            enumerate_lattice(&g, 20).unwrap().sets(),
            vec![vec![], vec![0], vec![1], vec![0, 1]]
        );
    }

    #[test]
    fn two_cycle_is_not_antisymmetric() {
        let g = graph(2, &[(0, 1), (1, 0)]);
        assert!(partial_order(0, 1, &g) && partial_order(1, 0, &g));
    }

    #[test]
    fn transitive_through_chain() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        assert!(partial_order(0, 2, &g));
        assert!(partial_order(1, 1, &g));
    }

    #[test]
    fn cap_enforced() {
        let g = graph(5, &[]);
        assert!(matches!(
            enumerate_lattice(&g, 4),
            Err(CfsError::SizeCap { .. })
        ));
    }
}
