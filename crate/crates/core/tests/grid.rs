use std::collections::HashSet;

use ks_core::colouring::{is_k_colourable, solve_101_problem};
use ks_core::enumerate::{enumerate, Filters};
use ks_core::graph6;
use ks_core::grid::{
    direction_count, enumerate_grid_subsystems, generate_grid, grid_embed, grid_graph, is_critical,
    minimize_uncolourable, GridDirection, GridSystem, SubsystemSearchMode, DEFAULT_EMBED_NODE_LIMIT,
};
use ks_core::Graph;

fn surface_points(n: i32) -> Vec<[i32; 3]> {
    let mut out = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            for z in -n..=n {
                if x.abs().max(y.abs()).max(z.abs()) == n {
                    out.push([x, y, z]);
                }
            }
        }
    }
    out
}

#[test]
fn counts_match_formula_and_raw_points() {
    for n in 1..=12u32 {
        let k = 2 * n as usize;
        let formula = ((k + 1).pow(3) - (k - 1).pow(3)) / 2;
        assert_eq!(generate_grid(n).unwrap().len(), formula);
        assert_eq!(direction_count(n), formula);
    }
    for n in 1..=4 {
        assert_eq!(generate_grid(n as u32).unwrap().len(), surface_points(n).len() / 2);
    }
    assert_eq!(generate_grid(1).unwrap().len(), 13);
    assert_eq!(generate_grid(2).unwrap().len(), 49);
    assert_eq!(generate_grid(4).unwrap().len(), 193);
}

#[test]
fn one_representative_per_antipodal_pair() {
    for n in 1..=4 {
        let sys = generate_grid(n as u32).unwrap();
        let mut seen = HashSet::new();
        for &d in sys.directions() {
            assert!(d.is_normalised() && d.chebyshev() == n);
            assert!(seen.insert(d.to_array()));
            let neg = GridDirection::new(-d.x, -d.y, -d.z);
            assert!(!neg.is_normalised());
            assert_eq!(neg.normalised(), d);
        }
        for p in surface_points(n) {
            let d = GridDirection::new(p[0], p[1], p[2]).normalised();
            assert!(sys.index_of(d).is_some(), "{p:?}");
        }
    }
}

#[test]
fn orthogonality_lists_and_complements_by_brute_force() {
    for n in 1..=3u32 {
        let sys = generate_grid(n).unwrap();
        let ds = sys.directions();
        for i in 0..ds.len() {
            let want: Vec<u32> = (0..ds.len() as u32).filter(|&j| ds[i].dot(ds[j as usize]) == 0).collect();
            let mut got = sys.orthogonal(i).to_vec();
            got.sort_unstable();
            assert_eq!(got, want);
            for &j in &want {
                let third: Vec<usize> =
                    (0..ds.len()).filter(|&k| ds[k].dot(ds[i]) == 0 && ds[k].dot(ds[j as usize]) == 0).collect();
                assert!(third.len() <= 1);
                assert_eq!(sys.complement(i, j as usize), third.first().copied());
            }
        }
    }
}

/// Plain backtracking over injective maps in vertex order.
fn brute_embeds(g: &Graph, sys: &GridSystem) -> bool {
    fn go(g: &Graph, sys: &GridSystem, map: &mut Vec<usize>) -> bool {
        let v = map.len();
        if v == g.n() {
            return true;
        }
        for d in 0..sys.len() {
            if map.contains(&d) {
                continue;
            }
            if (0..v).all(|u| !g.has_edge(u, v) || sys.direction(map[u]).dot(sys.direction(d)) == 0) {
                map.push(d);
                if go(g, sys, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    go(g, sys, &mut Vec::new())
}

#[test]
fn grid_embed_agrees_with_plain_backtracking() {
    let grids = [generate_grid(1).unwrap(), generate_grid(2).unwrap()];
    for n in 1..=6 {
        for g in enumerate(n, Filters::CONNECTED_SQUARE_FREE, None).unwrap() {
            for sys in &grids {
                let out = grid_embed(&g, sys, DEFAULT_EMBED_NODE_LIMIT).unwrap();
                assert_eq!(out.embedding().is_some(), brute_embeds(&g, sys), "{} N={}", graph6::encode(&g), sys.n());
            }
        }
    }
}

#[test]
fn squares_never_embed() {
    let sys = generate_grid(3).unwrap();
    let c4 = Graph::cycle(4).unwrap();
    assert!(grid_embed(&c4, &sys, DEFAULT_EMBED_NODE_LIMIT).unwrap().embedding().is_none());
}

#[test]
fn embedded_graphs_are_four_colourable() {
    let grids: Vec<GridSystem> = (1..=5).map(|n| generate_grid(n).unwrap()).collect();
    let mut embedded = 0;
    for n in 1..=9 {
        for g in enumerate(n, Filters::CONNECTED_SQUARE_FREE, None).unwrap() {
            if let Some(e) =
                grids.iter().find_map(|s| grid_embed(&g, s, DEFAULT_EMBED_NODE_LIMIT).unwrap().embedding().cloned())
            {
                assert!(e.validate(&g));
                assert!(is_k_colourable(&g, 4), "{}", graph6::encode(&g));
                embedded += 1;
            }
        }
    }
    assert!(embedded > 900);
}

#[test]
fn grid_graphs_are_square_free_with_expected_triangles() {
    let sys = generate_grid(1).unwrap();
    let g = grid_graph(&sys).unwrap();
    assert!(g.is_square_free());
    assert_eq!(g.triangles().len(), sys.triangles().len());
}

#[test]
fn n2_grid_minimises_to_a_critical_31_vertex_system() {
    let sys = generate_grid(2).unwrap();
    let kept = minimize_uncolourable(&sys).unwrap();
    let p = sys.problem();
    let as_usize: Vec<usize> = kept.iter().map(|&v| v as usize).collect();
    assert!(kept.len() >= 31);
    assert!(is_critical(&p, &as_usize));
    let sub = sys.subgraph(&kept).unwrap();
    assert!(!ks_core::colouring::is_101_colourable(&sub));
}

#[test]
fn sampled_subsystems_are_critical_and_distinct() {
    let sys = generate_grid(2).unwrap();
    let p = sys.problem();
    let s =
        enumerate_grid_subsystems(&sys, 64, 1_000_000, SubsystemSearchMode::Sampled { samples: 6, seed: 9 }).unwrap();
    assert!(!s.found.is_empty() && !s.truncated);
    let labels: HashSet<_> = s.found.iter().map(|x| x.canonical.upper_triangle()).collect();
    assert_eq!(labels.len(), s.found.len());
    for x in &s.found {
        let v: Vec<usize> = x.vertices.iter().map(|&v| v as usize).collect();
        assert!(is_critical(&p, &v));
    }
    let again =
        enumerate_grid_subsystems(&sys, 64, 1_000_000, SubsystemSearchMode::Sampled { samples: 6, seed: 9 }).unwrap();
    assert_eq!(again.found, s.found);
}

#[test]
fn colourable_grid_has_no_subsystems() {
    let sys = generate_grid(1).unwrap();
    assert!(solve_101_problem(&sys.problem()).0.is_colourable());
    let s = enumerate_grid_subsystems(&sys, 13, 1000, SubsystemSearchMode::Exhaustive).unwrap();
    assert!(s.found.is_empty());
}
