use fkr_core::graphcore::Poset;
use fkr_core::intlin::{int, Int, IntMatrix};
use fkr_core::lift::{factor_slp, is_allowable, lift_poset, transvections, KWebIso, Lift, DEFAULT_BUDGET};
use fkr_core::posetblock::{BlockMatrix, Equivalence};
use fkr_core::random::{random_equivalence, random_glp, random_graph, random_poset};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_block(rng: &mut ChaCha8Rng, k: usize) -> (Poset, Vec<usize>, BlockMatrix) {
    let poset = random_poset(rng, k, 0.6);
    let labels: Vec<usize> = (0..k).flat_map(|j| std::iter::repeat_n(j, rng.gen_range(1..=2))).collect();
    let n = labels.len();
    let m = IntMatrix::from_fn(n, n, |r, c| {
        if poset.leq(labels[c], labels[r]) {
            int(rng.gen_range(-2..=3))
        } else {
            Int::zero()
        }
    });
    let b = BlockMatrix::square(poset.clone(), labels.clone(), m).unwrap();
    (poset, labels, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn equivalences_compose_and_invert(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 6);
        let e = random_equivalence(&mut rng, &g, 6);
        prop_assert!(e.verify(false));
        let back = e.inverse().unwrap();
        prop_assert!(back.verify(false));
        let round = e.compose(&back).unwrap();
        prop_assert_eq!(&round.target, &e.source);
        prop_assert!(round.u.matrix().is_identity() && round.v.matrix().is_identity());
    }

    #[test]
    fn induced_kweb_isos_check(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 6);
        let e = random_equivalence(&mut rng, &g, 6);
        let kweb = KWebIso::induced(&e).unwrap();
        prop_assert!(kweb.check(&e.source, &e.target).is_ok());
        prop_assert!(kweb.agrees_with(&kweb, &e.target));
    }

    #[test]
    fn lifts_are_never_wrong(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=2);
        let (poset, labels, b) = random_block(&mut rng, k);
        let u = random_glp(&mut rng, &poset, &labels, 5, true);
        let v = random_glp(&mut rng, &poset, &labels, 5, true);
        let e = Equivalence::from_matrices(&b, u, v).unwrap();
        let kweb = KWebIso::induced(&e).unwrap();
        match lift_poset(&b, &e.target, &kweb, DEFAULT_BUDGET, seed).unwrap() {
            Lift::Found(f) => {
                prop_assert!(f.verify(false));
                prop_assert_eq!(&f.source, &b);
                prop_assert_eq!(&f.target, &e.target);
                prop_assert!(kweb.agrees_with(&KWebIso::induced(&f).unwrap(), &e.target));
            }
            Lift::Absent(why) => prop_assert!(false, "a lift exists but was reported absent: {}", why),
            Lift::Inconclusive(_) => {}
        }
    }

    #[test]
    fn self_equivalence_legs_are_allowable(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let b = IntMatrix::from_fn(n, n, |_, _| int(rng.gen_range(-3..=3)));
        prop_assert!(is_allowable(&b, &IntMatrix::identity(n)).unwrap());
        prop_assert!(is_allowable(&b, &IntMatrix::identity(n).scale(&int(-1))).unwrap());
    }

    #[test]
    fn slp_factorizations_multiply_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=3);
        let poset = random_poset(&mut rng, k, 0.6);
        let labels: Vec<usize> = (0..k).flat_map(|j| std::iter::repeat_n(j, rng.gen_range(1..=2))).collect();
        let m = random_glp(&mut rng, &poset, &labels, 8, false);
        let u = BlockMatrix::square(poset, labels, m.clone()).unwrap();
        prop_assert!(u.is_slp());
        let n = m.rows();
        let product = transvections(&u).unwrap().iter().fold(IntMatrix::identity(n), |acc, t| &acc * &t.matrix(n));
        prop_assert_eq!(&product, &m);
        let blocks = factor_slp(&u).unwrap();
        let product = blocks.iter().fold(IntMatrix::identity(n), |acc, f| &acc * f.matrix());
        prop_assert_eq!(&product, &m);
    }
}

#[test]
fn scalar_outside_the_unit_classes_is_refused() {
    // cok = Z/5, delta = 5: only ±1 survive
    let b = IntMatrix::from_rows(&[[5]]);
    assert!(is_allowable(&b, &IntMatrix::from_rows(&[[4]])).unwrap());
    assert!(!is_allowable(&b, &IntMatrix::from_rows(&[[2]])).unwrap());
}
