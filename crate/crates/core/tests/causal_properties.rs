mod common;

use cfs_core::causal::{
    ell, enumerate_lattice, full_mask, mask_to_set, perp_of_mask, set_to_mask,
    tangent_cone_histogram, tangent_map, CausalGraph, CausalOrder, ConeBin, LengthScales,
};
use cfs_core::linalg::c64;
use cfs_core::{CausalFermionSystem, SystemPoint, Tolerances};
use common::*;
use proptest::prelude::*;

fn graph_strategy(max_n: usize, dag: bool) -> impl Strategy<Value = CausalGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n, 0.1f64..3.0), 0..(2 * n + 1)).prop_map(move |raw| {
            let edges: Vec<(usize, usize, f64)> =
                raw.into_iter().filter(|(u, v, _)| !dag || u < v).collect();
            let ids = (0..n).map(|i| format!("v{i}")).collect();
            CausalGraph::from_edges(ids, &edges).unwrap()
        })
    })
}

/// `reach[k][u][v]`: a walk of exactly `k` steps from `u` to `v`.
fn step_reachability(g: &CausalGraph) -> Vec<Vec<Vec<bool>>> {
    let n = g.len();
    let mut layers = vec![vec![vec![false; n]; n]];
    for u in 0..n {
        layers[0][u][u] = true;
    }
    for k in 1..=2 * n {
        let prev = &layers[k - 1];
        let mut next = vec![vec![false; n]; n];
        for u in 0..n {
            for w in 0..n {
                if prev[u][w] {
                    for e in g.edges_from(w) {
                        next[u][e.target] = true;
                    }
                }
            }
        }
        layers.push(next);
    }
    layers
}

/// Longest simple path with at least one step, by exhaustive search.
fn longest_simple(g: &CausalGraph, x: usize, y: usize) -> Option<f64> {
    fn go(
        g: &CausalGraph,
        u: usize,
        y: usize,
        len: f64,
        seen: &mut Vec<bool>,
        best: &mut Option<f64>,
    ) {
        for e in g.edges_from(u) {
            let l = len + e.weight;
            if e.target == y {
                *best = Some(best.map_or(l, |b: f64| b.max(l)));
            }
            if !seen[e.target] {
                seen[e.target] = true;
                go(g, e.target, y, l, seen, best);
                seen[e.target] = false;
            }
        }
    }
    let mut seen = vec![false; g.len()];
    seen[x] = true;
    let mut best = None;
    go(g, x, y, 0.0, &mut seen, &mut best);
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn distance_matches_exhaustive_search(g in graph_strategy(7, false)) {
        let n = g.len();
        let reach = step_reachability(&g);
        let any = |u: usize, v: usize, from: usize| (from..=2 * n).any(|k| reach[k][u][v]);
        let on_cycle: Vec<bool> = (0..n).map(|w| any(w, w, 1)).collect();
        let d = g.distance_matrix();
        for x in 0..n {
            for y in 0..n {
                let unbounded = (0..n).any(|w| on_cycle[w] && any(x, w, 0) && any(w, y, 0));
                if unbounded {
                    prop_assert!(d[x][y].is_infinite(), "d({x},{y}) = {}", d[x][y]);
                } else {
                    let expect = longest_simple(&g, x, y).unwrap_or(0.0);
                    prop_assert!((d[x][y] - expect).abs() <= 1e-12 * expect.max(1.0), "d({x},{y}) = {} vs {expect}", d[x][y]);
                }
            }
        }
    }

    #[test]
    fn reverse_triangle_inequality(g in graph_strategy(8, true)) {
        let d = g.distance_matrix();
        let n = g.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if d[x][y] > 0.0 && d[y][z] > 0.0 {
                        prop_assert!(d[x][z] >= d[x][y] + d[y][z] - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn order_is_a_preorder(g in graph_strategy(7, false)) {
        let o = CausalOrder::from_graph(&g);
        let d = g.distance_matrix();
        let n = g.len();
        for x in 0..n {
            prop_assert!(o.leq(x, x));
            for y in 0..n {
                prop_assert_eq!(o.leq(x, y), x == y || d[x][y] > 0.0);
                for z in 0..n {
                    if o.leq(x, y) && o.leq(y, z) {
                        prop_assert!(o.leq(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonal_complement_is_a_galois_connection(g in graph_strategy(7, false), a in any::<u64>(), b in any::<u64>()) {
        let n = g.len();
        let perp = CausalOrder::from_graph(&g).perp_masks().unwrap();
        let (a, b) = (a & full_mask(n), b & full_mask(n));
        let pa = perp_of_mask(&perp, a);
        // antitone
        prop_assert_eq!(perp_of_mask(&perp, a & b) & pa, pa);
        // extensive and idempotent closure
        let paa = perp_of_mask(&perp, pa);
        prop_assert_eq!(paa & a, a);
        prop_assert_eq!(perp_of_mask(&perp, paa), pa);
        let o = CausalOrder::from_graph(&g);
        prop_assert_eq!(set_to_mask(&o.ortho_complement(&mask_to_set(a))), pa);
    }

    #[test]
    fn lattice_is_exactly_the_closed_sets(g in graph_strategy(8, false)) {
        let n = g.len();
        let perp = CausalOrder::from_graph(&g).perp_masks().unwrap();
        let lattice = enumerate_lattice(&g, 20).unwrap();
        let closed: Vec<u64> = (0..=full_mask(n))
            .filter(|&m| perp_of_mask(&perp, perp_of_mask(&perp, m)) == m)
            .collect();
        prop_assert_eq!(lattice.len(), closed.len());
        for &m in &closed {
            prop_assert!(lattice.contains(m));
        }
        for &a in &lattice.masks {
            for &b in &lattice.masks {
                prop_assert!(lattice.contains(a & b));
                let join = perp_of_mask(&perp, perp_of_mask(&perp, a | b));
                prop_assert!(lattice.contains(join));
            }
        }
        for w in lattice.masks.windows(2) {
            prop_assert!(w[0].count_ones() <= w[1].count_ones());
        }
    }

    #[test]
    fn length_function_is_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y) = mixed_pair(&mut r, 6, 2);
        let s = LengthScales::new(0.05, 20.0).unwrap();
        let (a, b) = (ell(&x, &y, 2, &s).unwrap(), ell(&y, &x, 2, &s).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn cone_bins_are_scale_invariant(seed in any::<u64>(), s in 1e-3f64..1e3) {
        let mut r = rng(seed);
        let a = complex_gaussian(&mut r, 4, 4);
        let normal = complex_gaussian(&mut r, 4, 4);
        let bins = [
            ConeBin::HalfSpace { normal: normal.clone(), strict: true },
            ConeBin::DiagonalSigns { signs: vec![Some(true), None, Some(false), None] },
            ConeBin::Intersection { bins: vec![ConeBin::All, ConeBin::HalfSpace { normal, strict: false }] },
        ];
        let scaled = a.scale(s);
        for b in &bins {
            prop_assert_eq!(b.contains(&a), b.contains(&scaled));
        }
    }
}

#[test]
fn three_chain_by_hand() {
    let ids = (0..3).map(|i| format!("v{i}")).collect();
    let g = CausalGraph::from_edges(ids, &[(0, 1, 1.0), (1, 2, 2.0), (0, 2, 2.5)]).unwrap();
    assert_eq!(g.distance(0, 2), 3.0);
    assert_eq!(g.distance(0, 1), 1.0);
    assert_eq!(g.distance(2, 0), 0.0);
    assert_eq!(g.distance(1, 1), 0.0);
    let o = CausalOrder::from_graph(&g);
    assert!(o.leq(0, 2) && !o.leq(2, 0));
    // a total order: only the empty set and everything are closed
    assert_eq!(
        enumerate_lattice(&g, 20).unwrap().sets(),
        vec![vec![], vec![0, 1, 2]]
    );
}

#[test]
fn lattice_cap_is_enforced() {
    let ids: Vec<String> = (0..21).map(|i| format!("v{i}")).collect();
    let g = CausalGraph::from_edges(ids, &[]).unwrap();
    assert!(enumerate_lattice(&g, 20).is_err());
}

#[test]
fn tangent_map_of_base_point_vanishes_and_histogram_normalizes() {
    let tol = Tolerances::default();
    let mut r = rng(5);
    let (x, y) = nearby_pair(&mut r, 6, 2, 0.01);
    assert!(max_abs(&tangent_map(&x, &x).unwrap()) < 1e-12);
    let t = tangent_map(&x, &y).unwrap();
    // oracle: B_x^† (y - x) x B_x
    let oracle = x.basis().adjoint() * (y.matrix() - x.matrix()) * x.matrix() * x.basis();
    assert!(max_abs(&(&t - &oracle)) < 1e-12);
    let far = point_from(&frame(&mut r, 6, 4), &[50.0, 40.0, -30.0, -60.0]);
    let pts = vec![
        SystemPoint::new("x", 1.0, x),
        SystemPoint::new("y", 2.0, y),
        SystemPoint::new("far", 5.0, far),
    ];
    let sys = CausalFermionSystem::new(2, pts, tol).unwrap();
    let away = ConeBin::HalfSpace {
        normal: t.map(|z| z * c64(-1.0, 0.0)),
        strict: true,
    };
    assert!(!away.contains(&t));
    let h = tangent_cone_histogram(&sys, 0, 1.0, &[ConeBin::All, away]).unwrap();
    assert_eq!(h.ball_points, vec![0, 1]);
    assert_eq!(h.ball_weight, 3.0);
    assert_eq!(h.masses[0], 1.0);
    // only the base point, whose image is zero up to rounding, can land in it
    assert!(h.masses[1] <= 1.0 / 3.0);
}
