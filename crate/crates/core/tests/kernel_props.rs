use inducert_core::exactnum::{rat, Rational};
use inducert_core::expansion::verify_expansion_identity;
use inducert_core::kernel::{balanced_b, t_balanced_b};
use inducert_core::{Graph, StepKernel};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn widths(blocks: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(1i64..=5, blocks).prop_map(|ws| {
        let total: i64 = ws.iter().sum();
        ws.into_iter().map(|w| rat(w, total)).collect()
    })
}

fn kernel(max_blocks: usize) -> impl Strategy<Value = StepKernel> {
    (1..=max_blocks).prop_flat_map(|b| {
        (widths(b), proptest::collection::vec(entry(), b * b)).prop_map(move |(w, v)| {
            let values = (0..b).map(|i| (0..b).map(|j| v[i.min(j) * b + i.max(j)].clone()).collect()).collect();
            StepKernel::new(w, values).unwrap()
        })
    })
}

/// `f(x)f(y)` with `∫f = 0`, made so by solving for the last block.
fn balanced_rank_one(max_blocks: usize) -> impl Strategy<Value = StepKernel> {
    (2..=max_blocks).prop_flat_map(|b| {
        (widths(b), proptest::collection::vec(entry(), b - 1)).prop_map(move |(w, mut f)| {
            let partial: Rational = f.iter().zip(&w).map(|(x, y)| x * y).sum();
            f.push(-partial / &w[b - 1]);
            StepKernel::rank_one(w, &f).unwrap()
        })
    })
}

/// Graphs with at least one edge and no isolated vertices.
fn graph(min: usize, max: usize) -> impl Strategy<Value = Graph> {
    (min..=max)
        .prop_flat_map(|n| {
            (Just(n), 1u64..(1u64 << (n * (n - 1) / 2))).prop_map(|(n, mask)| Graph::from_pair_mask(n, mask))
        })
        .prop_filter("no isolated vertices", |g| !g.has_isolated_vertex())
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn densities_are_relabeling_invariant(
        (g, p) in graph(2, 5).prop_flat_map(|g| { let n = g.order(); (Just(g), perm(n)) }),
        w in kernel(3),
    ) {
        let h = g.relabel(&p);
        prop_assert_eq!(w.t_hom(&g).unwrap(), w.t_hom(&h).unwrap());
        prop_assert_eq!(w.rho_induced(&g).unwrap(), w.rho_induced(&h).unwrap());
    }

    #[test]
    fn refinement_changes_nothing(g in graph(2, 4), w in kernel(3), i in 0usize..3, a in 1i64..7) {
        let i = i % w.blocks();
        let finer = w.split_block(i, &rat(a, 7)).unwrap();
        prop_assert_eq!(finer.blocks(), w.blocks() + 1);
        prop_assert_eq!(w.t_hom(&g).unwrap(), finer.t_hom(&g).unwrap());
        prop_assert_eq!(w.rho_induced(&g).unwrap(), finer.rho_induced(&g).unwrap());
    }

    #[test]
    fn four_cycle_density_is_nonnegative(w in kernel(4)) {
        prop_assert!(!w.t_hom(&Graph::cycle(4)).unwrap().is_negative());
    }

    #[test]
    fn balanced_kernels_kill_pendant_vertices(d in balanced_rank_one(4), g in graph(2, 4), at in 0usize..4) {
        prop_assert!(d.is_balanced());
        // hang a new vertex off one existing vertex
        let n = g.order();
        let mut edges = g.edges();
        edges.push((at % n, n));
        let h = Graph::from_edges(n + 1, &edges).unwrap();
        prop_assert!(d.t_hom(&h).unwrap().is_zero());
    }

    #[test]
    fn tensor_densities_multiply(a in kernel(2), b in kernel(2), g in graph(2, 4)) {
        let t = a.tensor(&b);
        prop_assert_eq!(t.t_hom(&g).unwrap(), a.t_hom(&g).unwrap() * b.t_hom(&g).unwrap());
    }

    #[test]
    fn expansion_identity_holds(
        f in graph(3, 4),
        p in (1i64..=9).prop_map(|n| rat(n, 10)),
        d in kernel(3),
    ) {
        prop_assert!(verify_expansion_identity(&f, &p, &d).unwrap());
    }
}

#[test]
fn balanced_b_closed_form() {
    let b = balanced_b();
    assert!(b.is_balanced());
    for g in [Graph::complete(3), Graph::cycle(4), Graph::cycle(5), Graph::path(3), Graph::complete(4)] {
        assert_eq!(b.t_hom(&g).unwrap(), t_balanced_b(&g));
    }
}
