use toprec::catalog::{airy, lambert, weil_petersson, WP_GERM_WINDOW};
use toprec::coeff::Coeff;
use toprec::engine::OmegaTable;
use toprec::form::symmetry_check;
use toprec::graphs::{enumerate_graphs, evaluate_graph, graph_sum};

const CASES: [(u32, usize); 5] = [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1)];

#[test]
fn graph_sum_matches_engine_on_airy() {
    let mut t = OmegaTable::new(airy(), Default::default()).unwrap();
    for (g, n) in CASES {
        assert_eq!(graph_sum(&airy(), g, n).unwrap(), t.omega(g, n).unwrap(), "({g},{n})");
    }
}

#[test]
fn graph_sum_matches_engine_on_lambert() {
    let mut t = OmegaTable::new(lambert(), Default::default()).unwrap();
    for (g, n) in CASES {
        assert_eq!(graph_sum(&lambert(), g, n).unwrap(), t.omega(g, n).unwrap(), "({g},{n})");
    }
}

#[test]
fn single_graph_symmetric_only_after_summation() {
    let c = lambert();
    let graphs = enumerate_graphs(0, 4).unwrap();
    let one = evaluate_graph(&graphs[0], &c, 12).unwrap();
    assert!(!symmetry_check(&one));
    assert!(symmetry_check(&graph_sum(&c, 0, 4).unwrap()));
}

// Res_a is invariant under q -> σ(q), which swaps the two graphs.
#[test]
fn both_three_point_graphs_weigh_the_same() {
    let c = weil_petersson(WP_GERM_WINDOW);
    let graphs = enumerate_graphs(0, 3).unwrap();
    let a = evaluate_graph(&graphs[0], &c, 10).unwrap();
    let b = evaluate_graph(&graphs[1], &c, 10).unwrap();
    assert_eq!(a, b);
    let total = graph_sum(&c, 0, 3).unwrap();
    assert_eq!(total.len(), 1);
    let (k, c0) = total.terms().iter().next().unwrap();
    assert!(k.iter().all(|s| s.order == 2));
    assert!(*c0 == Coeff::one() || *c0 == Coeff::from_int(-1), "{c0}");
}
