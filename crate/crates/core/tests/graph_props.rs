use ks_core::canon::{canonical_label, is_canonical, DEFAULT_NODE_LIMIT};
use ks_core::enumerate::{count, enumerate, tickets, Filters};
use ks_core::graph6;
use ks_core::oracle::{brute_force_canonical_code, brute_force_classes, Matrix};
use ks_core::Graph;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p: f64 = rng.gen_range(0.05..0.7);
    let mut g = Graph::empty(n).unwrap();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

#[test]
fn square_free_agrees_with_subset_scan() {
    for n in 1..=6 {
        for index in 0..1u64 << (n * (n - 1) / 2) {
            let m = Matrix::from_index(n, index);
            assert_eq!(m.to_graph().is_square_free(), !m.has_square(), "n={n} index={index}");
        }
    }
}

#[test]
fn connectivity_agrees_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let n = rng.gen_range(1..=12);
        let g = random_graph(&mut rng, n);
        assert_eq!(g.is_connected(), Matrix::from_graph(&g).is_connected());
    }
}

fn trace_cubed(g: &Graph) -> u64 {
    let n = g.n();
    let a: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| g.has_edge(i, j) as u64).collect()).collect();
    let mul = |x: &Vec<Vec<u64>>, y: &Vec<Vec<u64>>| -> Vec<Vec<u64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect()).collect()
    };
    let a3 = mul(&mul(&a, &a), &a);
    (0..n).map(|i| a3[i][i]).sum()
}

#[test]
fn triangle_count_is_trace_of_cube_over_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let n = rng.gen_range(1..=20);
        let g = random_graph(&mut rng, n);
        let t = g.triangles();
        assert_eq!(t.len() as u64, trace_cubed(&g) / 6);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t.iter().all(|&(a, b, c)| a < b && b < c));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn graph6_round_trip(n in 1usize..=64, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n);
        let text = graph6::encode(&g);
        prop_assert!(text.bytes().all(|b| (63..=126).contains(&b)));
        prop_assert_eq!(graph6::decode(&text).unwrap(), g);
    }
}

#[test]
fn is_canonical_matches_brute_force() {
    for n in 1..=5 {
        for index in 0..1u64 << (n * (n - 1) / 2) {
            let m = Matrix::from_index(n, index);
            let g = m.to_graph();
            let own = m.code_under(&(0..n).collect::<Vec<_>>());
            assert_eq!(is_canonical(&g), own == brute_force_canonical_code(&m), "n={n} index={index}");
        }
    }
}

#[test]
fn canonical_label_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.gen_range(1..=7);
        let g = random_graph(&mut rng, n);
        let c = canonical_label(&g, DEFAULT_NODE_LIMIT).unwrap();
        assert_eq!(c.upper_triangle().bits(), brute_force_canonical_code(&Matrix::from_graph(&g)).as_slice());
        assert!(is_canonical(&c));
    }
}

#[test]
fn canonical_label_is_invariant_under_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let n = rng.gen_range(2..=16);
        let g = random_graph(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let a = canonical_label(&g, DEFAULT_NODE_LIMIT).unwrap();
        let b = canonical_label(&g.permuted(&perm), DEFAULT_NODE_LIMIT).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn enumeration_matches_oracle_classes() {
    for filters in [Filters::CONNECTED_SQUARE_FREE, Filters::NONE] {
        for n in 1..=6 {
            let ours: Vec<Vec<bool>> =
                enumerate(n, filters, None).unwrap().iter().map(|g| g.upper_triangle().bits().to_vec()).collect();
            let mut theirs: Vec<Vec<bool>> =
                brute_force_classes(n, filters).iter().map(brute_force_canonical_code).collect();
            let mut sorted = ours.clone();
            sorted.sort();
            theirs.sort();
            assert_eq!(sorted, theirs, "n={n} {filters}");
            sorted.dedup();
            assert_eq!(sorted.len(), ours.len(), "duplicates at n={n}");
        }
    }
}

#[test]
fn canonicity_is_prefix_closed() {
    for n in 2..=8 {
        for g in enumerate(n, Filters::NONE, None).unwrap() {
            let p = g.without_last().unwrap();
            assert!(is_canonical(&p), "{}", graph6::encode(&g));
            if g.is_connected() {
                assert!(p.is_connected(), "{}", graph6::encode(&g));
            }
        }
    }
}

#[test]
fn tickets_partition_the_enumeration() {
    for n in 1..=9 {
        let all = enumerate(n, Filters::CONNECTED_SQUARE_FREE, None).unwrap();
        for d in 1..=5 {
            let mut joined = Vec::new();
            let ts = tickets(n, d, Filters::CONNECTED_SQUARE_FREE);
            let mut total = 0;
            for t in &ts {
                let part = enumerate(n, Filters::CONNECTED_SQUARE_FREE, Some(t)).unwrap();
                total += count(n, Filters::CONNECTED_SQUARE_FREE, Some(t)).unwrap();
                joined.extend(part);
            }
            assert_eq!(joined, all, "n={n} d={d}");
            assert_eq!(total as usize, all.len());
        }
    }
}

#[test]
fn enumeration_outputs_satisfy_filters() {
    for n in 1..=9 {
        for g in enumerate(n, Filters::CONNECTED_SQUARE_FREE, None).unwrap() {
            assert!(g.is_connected() && g.is_square_free() && is_canonical(&g));
        }
    }
}

#[test]
fn upper_triangle_code_is_a_bijection() {
    for n in 1..=5 {
        let len = n * (n - 1) / 2;
        let mut seen = std::collections::HashSet::new();
        for index in 0..1u64 << len {
            let g = Matrix::from_index(n, index).to_graph();
            let code = g.upper_triangle();
            assert_eq!(code.bits().len(), len);
            assert_eq!(code.to_graph(), g);
            assert!(seen.insert(code.bits().to_vec()));
        }
        assert_eq!(seen.len(), 1 << len);
    }
}

#[test]
fn connected_pruning_matches_post_hoc_filtering() {
    for n in 1..=7 {
        for (pruned, plain) in [
            (Filters { square_free: false, connected: true }, Filters::NONE),
            (Filters::CONNECTED_SQUARE_FREE, Filters { square_free: true, connected: false }),
        ] {
            let want: Vec<Graph> =
                enumerate(n, plain, None).unwrap().into_iter().filter(|g| g.is_connected()).collect();
            let got = enumerate(n, pruned, None).unwrap();
            assert_eq!(got.len(), want.len(), "n={n} {pruned}");
            let a: std::collections::BTreeSet<_> = got.iter().map(|g| g.upper_triangle().bits().to_vec()).collect();
            let b: std::collections::BTreeSet<_> = want.iter().map(|g| g.upper_triangle().bits().to_vec()).collect();
            assert_eq!(a, b);
        }
    }
}
