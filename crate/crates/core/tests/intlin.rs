use fkr_core::intlin::{cokernel, int, kernel_basis, smith_normal_form, IntMatrix, LinearSolver};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix(max_dim: usize, max_entry: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-max_entry..=max_entry, r * c)
            .prop_map(move |v| IntMatrix::from_vec(r, c, v.into_iter().map(int).collect()).unwrap())
    })
}

fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut m = IntMatrix::identity(n);
        for (a, b, k, neg) in ops {
            if a != b {
                m.add_row_multiple(a, b, &int(k));
            } else if neg {
                m.negate_row(a);
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_form_is_a_diagonal_chain(a in matrix(5, 6)) {
        let s = smith_normal_form(&a);
        prop_assert!(s.p.is_unimodular());
        prop_assert!(s.q.is_unimodular());
        prop_assert_eq!(&(&s.p * &a) * &s.q, s.d.clone());
        for r in 0..s.d.rows() {
            for c in 0..s.d.cols() {
                if r != c {
                    prop_assert!(s.d[(r, c)].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero());
        }
    }

    #[test]
    fn cokernel_ignores_unimodular_change(
        (a, u, v) in matrix(4, 5).prop_flat_map(|a| {
            let (r, c) = (a.rows(), a.cols());
            (Just(a), unimodular(r), unimodular(c))
        })
    ) {
        let b = &(&u * &a) * &v;
        prop_assert!(cokernel(&a).is_isomorphic_to(&cokernel(&b)));
    }

    #[test]
    fn kernel_basis_spans_solutions(a in matrix(4, 4)) {
        let k = kernel_basis(&a);
        prop_assert!((&a * &k).is_zero());
        let s = smith_normal_form(&a);
        prop_assert_eq!(k.cols(), a.cols() - s.rank());
    }

    #[test]
    fn solver_finds_images(a in matrix(4, 5), x in prop::collection::vec(-4i64..=4, 5)) {
        let x: Vec<_> = x[..a.cols()].iter().map(|&v| int(v)).collect();
        let y = a.mul_vec(&x);
        let solver = LinearSolver::new(&a);
        let sol = solver.particular(&y).unwrap().expect("y is in the image");
        prop_assert_eq!(a.mul_vec(&sol), y);
    }

    #[test]
    fn unimodular_inverse_round_trips(u in (1usize..=4).prop_flat_map(unimodular)) {
        let inv = u.inverse_unimodular().unwrap();
        prop_assert!((&u * &inv).is_identity());
        prop_assert!(u.det().abs() == int(1));
    }
}

#[test]
fn cokernel_of_known_matrix() {
    let a = IntMatrix::from_rows(&[[2, 0], [0, 4]]);
    let g = cokernel(&a);
    assert_eq!(g.torsion(), vec![int(2), int(4)]);
    assert_eq!(g.free_rank(), 0);
    let z = cokernel(&IntMatrix::zeros(2, 1));
    assert_eq!(z.free_rank(), 2);
}
