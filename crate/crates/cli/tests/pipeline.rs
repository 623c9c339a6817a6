use fkr_cli::pipeline::{check_chain, compare, CompareOptions, Verdict};
use fkr_core::graphcore::Graph;
use fkr_core::intlin::IntMatrix;
use fkr_core::moves::splice_graph;

fn standard() -> Graph {
    Graph::new(vec!["x".into(), "y".into(), "z".into()], IntMatrix::from_rows(&[[2, 1, 1], [1, 2, 1], [1, 1, 3]])).unwrap()
}

#[test]
fn splice_pair_is_certified() {
    let g = standard();
    let s = splice_graph(&g, "x").unwrap();
    let opts = CompareOptions { unital: true, ..CompareOptions::default() };
    let r = compare(&g, &s, &opts).unwrap();
    assert_eq!(r.verdict, Verdict::IsomorphicCertified);
    let chain = r.certificate_chain.as_ref().unwrap();
    check_chain(&g, &s, chain).unwrap();
}
