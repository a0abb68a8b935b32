use std::sync::Arc;

use proptest::prelude::*;
use rankmat::enumerate::{associative_tables, random_unordered_oracle};
use rankmat::formats::{parse_semigroup, parse_structure, parse_tree, write_semigroup, write_structure, write_tree};
use rankmat::kronecker::{equivalent, kronecker_product, SemigroupMatrix};
use rankmat::rank::{graph_cut_rank, matrix_ranks, type_matrix, Graph};
use rankmat::recovery::recover_partition;
use rankmat::semigroup::FiniteSemigroup;
use rankmat::structures::Structure;
use rankmat::trees::{all_trees, blocks, subforests, ternary_decode, ternary_encode, LinearPreorder, PartiallyOrderedTree};

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..=9).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * 2)
            .prop_map(move |e| Graph::new(n, e.into_iter().filter(|(a, b)| a != b)).unwrap())
    })
}

fn binary_structure() -> impl Strategy<Value = Structure> {
    (1usize..=4).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..=n * n).prop_map(move |pairs| Structure::binary(n, pairs).unwrap())
    })
}

fn matrix(s: Arc<FiniteSemigroup>) -> impl Strategy<Value = SemigroupMatrix> {
    let size = s.size();
    (1usize..=3, 1usize..=3).prop_flat_map(move |(r, c)| {
        let s = s.clone();
        proptest::collection::vec(proptest::collection::vec(0..size, c), r)
            .prop_map(move |rows| SemigroupMatrix::over(s.clone(), rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cut_rank_is_symmetric_and_bounded(g in graph(), x in any::<u64>()) {
        let n = g.vertex_count();
        let full = (1u64 << n) - 1;
        let x = x & full;
        let r = graph_cut_rank(&g, x);
        prop_assert_eq!(r, graph_cut_rank(&g, full & !x));
        prop_assert!(r <= (x.count_ones() as usize).min(n - x.count_ones() as usize));
    }

    #[test]
    fn type_matrices_transpose_under_complement(s in binary_structure(), x in any::<u64>(), m in 1usize..=2) {
        let n = s.universe_size();
        let full = (1u64 << n) - 1;
        let x = x & full;
        let a = matrix_ranks(&type_matrix(&s, x, m).unwrap());
        let b = matrix_ranks(&type_matrix(&s, full & !x, m).unwrap());
        prop_assert_eq!(a.distinct_rows, b.distinct_cols);
        prop_assert_eq!(a.distinct_cols, b.distinct_rows);
        prop_assert!(a.field_rank <= a.distinct_rows);
    }

    #[test]
    fn structures_round_trip(s in binary_structure()) {
        prop_assert_eq!(parse_structure(&write_structure(&s)).unwrap(), s);
    }

    #[test]
    fn trees_round_trip(n in 1usize..=5, pick in any::<prop::sample::Index>()) {
        let trees = all_trees(n);
        let t = pick.get(&trees).clone();
        prop_assert_eq!(ternary_decode(&ternary_encode(&t)).unwrap(), t.clone());
        let text = write_tree(&PartiallyOrderedTree::unordered(t.clone()), None);
        let (back, _) = parse_tree(&text).unwrap();
        prop_assert_eq!(back.tree, t.clone());
        let full = (1u64 << n) - 1;
        prop_assert!(subforests(&t).contains(&full));
    }

    #[test]
    fn semigroups_round_trip(pick in any::<prop::sample::Index>()) {
        let tables = associative_tables(3).unwrap();
        let s = pick.get(&tables);
        prop_assert_eq!(&parse_semigroup(&write_semigroup(s)).unwrap(), s);
    }

    #[test]
    fn kronecker_rows_multiply((a, b) in (matrix(Arc::new(FiniteSemigroup::brandt(2))), matrix(Arc::new(FiniteSemigroup::brandt(2))))) {
        let p = kronecker_product(&a, &b).unwrap();
        prop_assert!(p.distinct_rows() <= a.distinct_rows() * b.distinct_rows());
        prop_assert_eq!(p.row_count(), a.row_count() * b.row_count());
        prop_assert!(equivalent(&p, &p.transpose().transpose()));
    }

    #[test]
    fn blocks_tile_the_classes(sizes in proptest::collection::vec(1usize..=3, 1..=6), y in any::<u64>()) {
        let mut classes = Vec::new();
        let mut next = 0;
        for s in sizes {
            classes.push(((1u64 << s) - 1) << next);
            next += s;
        }
        let p = LinearPreorder::new(next, classes.clone()).unwrap();
        let bl = blocks(&p, y & ((1u64 << next) - 1));
        prop_assert_eq!(bl[0].first, 0);
        prop_assert_eq!(bl.last().unwrap().last, classes.len() - 1);
        prop_assert!(bl.windows(2).all(|w| w[0].last + 1 == w[1].first));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_oracles_recover(seed in 1000u64..100_000) {
        let o = random_unordered_oracle(seed).unwrap();
        let mut got = recover_partition(&o).unwrap();
        let mut want = o.hidden_classes().to_vec();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }
}
