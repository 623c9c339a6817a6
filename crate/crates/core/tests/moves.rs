mod common;

use fkr_core::fk::fk_invariant;
use fkr_core::graphcore::Graph;
use fkr_core::moves::{
    chain, check_certificate, cuntz_splice, enlarge_block, splice_conversion, standardize, verify_certificate,
    MoveCertificate,
};
use fkr_core::random::{random_graph, random_standard_graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_moves_certify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 6);
        for _ in 0..6 {
            if let Some((target, c)) = common::step(&mut rng, &g) {
                prop_assert!(verify_certificate(&c), "{:?}", check_certificate(&c));
                prop_assert_eq!(&c.target, &target);
                prop_assert!(fk_invariant(&target).is_ok());
            }
        }
    }

    #[test]
    fn chains_certify_and_serialize(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 5);
        let steps = common::steps(&mut rng, &g, 4);
        let c = chain(&g, steps).unwrap();
        prop_assert!(verify_certificate(&c));
        let text = serde_json::to_string(&c).unwrap();
        let back: MoveCertificate = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn standard_form_moves_certify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_standard_graph(&mut rng, 3, 2);
        let u = g.vertex(0).to_string();
        let (_, c) = cuntz_splice(&g, &u).unwrap();
        prop_assert!(verify_certificate(&c));
        let (_, c) = enlarge_block(&g, 0).unwrap();
        prop_assert!(verify_certificate(&c));
        prop_assert!(splice_conversion(&g, &u).unwrap().verify(false));
    }

    #[test]
    fn standardize_reaches_standard_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 4);
        if let Ok((_, c)) = standardize(&g) {
            prop_assert!(verify_certificate(&c));
        }
    }
}

#[test]
fn tampered_certificate_is_rejected() {
    let g = Graph::from_edges(&["a", "b"], &[("a", "a", 2), ("a", "b", 1), ("b", "b", 3)]).unwrap();
    let (_, mut c) = fkr_core::moves::row_add(&g, "a", "b").unwrap();
    assert!(verify_certificate(&c));
    c.u.negate_row(0);
    assert!(!verify_certificate(&c));
}
