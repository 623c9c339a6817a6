use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Lift;
use crate::intlin::{int, kernel_basis, smith_normal_form, solve_linear, Int, IntMatrix, LinearSolver};
use crate::{Error, Result};

/// Checks that `m` maps the column span of `b` into itself.
pub(super) fn well_defined(b: &IntMatrix, m: &IntMatrix) -> Result<()> {
    if !b.is_square() || m.rows() != b.rows() || m.cols() != b.rows() {
        return Err(Error::Dimension(format!(
            "{}x{} map on the cokernel of a {}x{} matrix",
            m.rows(),
            m.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let solver = LinearSolver::new(b);
    let image = m * b;
    for j in 0..image.cols() {
        if !solver.in_column_span(&image.col(j)) {
            return Err(Error::NotWellDefined(format!("column {j} of the relations leaves the image")));
        }
    }
    Ok(())
}

/// Whether `det(m) ≡ ±1` modulo the gcd of the entries of `b` (exactly `±1` when the gcd is 0).
pub fn is_allowable(b: &IntMatrix, m: &IntMatrix) -> Result<bool> {
    well_defined(b, m)?;
    let delta = b.gcd_entries();
    let det = m.det();
    if delta.is_zero() {
        return Ok(det.abs().is_one());
    }
    if delta.is_one() {
        return Ok(true);
    }
    let r = det.mod_floor(&delta);
    Ok(r.is_one() || r == &delta - Int::one())
}

/// `(U, V)` with `U·b·V = b`, `U` inducing `phi` on `cok b` and `V⁻¹` acting
/// on `ker b` by `psi` (coordinates of [`kernel_basis`]).
pub fn lift_single(b: &IntMatrix, phi: &IntMatrix, psi: &IntMatrix, budget: u64) -> Result<Lift<(IntMatrix, IntMatrix)>> {
    lift_single_seeded(b, phi, psi, budget, 0)
}

/// As [`lift_single`]; a nonzero `seed` varies the free parts of the lift.
pub fn lift_single_seeded(
    b: &IntMatrix,
    phi: &IntMatrix,
    psi: &IntMatrix,
    budget: u64,
    seed: u64,
) -> Result<Lift<(IntMatrix, IntMatrix)>> {
    let n = b.rows();
    let kernel = kernel_basis(b);
    let k = kernel.cols();
    if psi.rows() != k || psi.cols() != k {
        return Err(Error::Dimension(format!("kernel map is {}x{}, kernel has rank {k}", psi.rows(), psi.cols())));
    }
    if !psi.is_unimodular() {
        return Err(Error::Precondition("kernel map is not an automorphism".into()));
    }
    if !is_allowable(b, phi)? {
        return Ok(Lift::Absent("determinant is not ±1 modulo the gcd of the block".into()));
    }
    let snf = smith_normal_form(b);
    let r = snf.rank();
    let d: Vec<Int> = snf.diagonal()[..r].to_vec();
    let pinv = snf.p.inverse_unimodular().expect("unimodular transform");
    let qinv = snf.q.inverse_unimodular().expect("unimodular transform");
    let phi2 = &(&snf.p * phi) * &pinv;
    let head: Vec<usize> = (0..r).collect();
    let tail: Vec<usize> = (r..n).collect();
    let phi22 = phi2.submatrix(&tail, &tail);
    if !phi22.is_unimodular() {
        return Err(Error::Precondition("map is not an automorphism of the free part".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(m) = unimodular_lift(&phi2.submatrix(&head, &head), &d, budget, &mut rng) else {
        return Ok(Lift::Inconclusive(format!("no unimodular lift within {budget} candidates")));
    };
    let minv = m.inverse_unimodular().expect("unimodular lift");
    let v11 = IntMatrix::from_fn(r, r, |i, j| {
        let x = &minv[(i, j)] * &d[j];
        debug_assert!((&x % &d[i]).is_zero());
        x / &d[i]
    });
    let mut u2 = IntMatrix::zeros(n, n);
    let mut v2 = IntMatrix::zeros(n, n);
    let psi_inv = psi.inverse_unimodular().expect("checked unimodular");
    for i in 0..r {
        for j in 0..r {
            u2[(i, j)] = m[(i, j)].clone();
            v2[(i, j)] = v11[(i, j)].clone();
        }
        for j in r..n {
            let shift = if seed == 0 { 0 } else { rng.gen_range(-1..=1) };
            u2[(i, j)] = &phi2[(i, j)] + &d[i] * int(shift);
        }
    }
    for i in r..n {
        for j in r..n {
            u2[(i, j)] = phi2[(i, j)].clone();
            v2[(i, j)] = psi_inv[(i - r, j - r)].clone();
        }
        if seed != 0 {
            for j in 0..r {
                v2[(i, j)] = int(rng.gen_range(-1..=1));
            }
        }
    }
    let u = &(&pinv * &u2) * &snf.p;
    let v = &(&snf.q * &v2) * &qinv;
    if &(&u * b) * &v != *b {
        return Err(Error::InvalidCertificate("lifted pair does not fix the block".into()));
    }
    let solver = LinearSolver::new(b);
    let diff = &u - phi;
    if (0..n).any(|j| !solver.in_column_span(&diff.col(j))) {
        return Err(Error::InvalidCertificate("lifted U induces a different cokernel map".into()));
    }
    let vinv = v.inverse_unimodular().expect("unimodular");
    if &vinv * &kernel != &kernel * psi {
        return Err(Error::InvalidCertificate("lifted V induces a different kernel map".into()));
    }
    Ok(Lift::Found((u, v)))
}

/// Signed cofactors of row 0.
fn row0_cofactors(m: &IntMatrix) -> Vec<Int> {
    let r = m.rows();
    let rows: Vec<usize> = (1..r).collect();
    (0..r)
        .map(|j| {
            let cols: Vec<usize> = (0..r).filter(|&c| c != j).collect();
            let minor = m.submatrix(&rows, &cols).det();
            if j % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect()
}

fn symmetric_residue(x: &Int, d: &Int) -> Int {
    let r = x.mod_floor(d);
    if &r * int(2) > *d {
        r - d
    } else {
        r
    }
}

/// A matrix `M` with `det M = ±1` and `M[i][j] ≡ phi[i][j]` modulo `d[i]`.
fn unimodular_lift(phi: &IntMatrix, d: &[Int], budget: u64, rng: &mut ChaCha8Rng) -> Option<IntMatrix> {
    let r = d.len();
    if r == 0 {
        return Some(IntMatrix::identity(0));
    }
    let base = IntMatrix::from_fn(r, r, |i, j| {
        if d[i].is_one() {
            int(i64::from(i == j))
        } else {
            symmetric_residue(&phi[(i, j)], &d[i])
        }
    });
    for attempt in 0..budget.max(1) {
        let mut m = base.clone();
        if attempt > 0 {
            let spread = 1 + (attempt / 50) as i64;
            for i in 1..r {
                for j in 0..r {
                    if rng.gen_bool(0.4) {
                        m[(i, j)] += &d[i] * int(rng.gen_range(-spread..=spread));
                    }
                }
            }
        }
        let c = row0_cofactors(&m);
        let d0 = (0..r).fold(Int::zero(), |acc, j| acc + &m[(0, j)] * &c[j]);
        let cm = IntMatrix::from_vec(1, r, c.clone()).expect("row vector");
        for s in [Int::one(), -Int::one()] {
            let need = &s - &d0;
            if !(&need % &d[0]).is_zero() {
                continue;
            }
            let Ok(Some(sol)) = solve_linear(&cm, &[&need / &d[0]]) else {
                continue;
            };
            for (j, kj) in sol.particular.iter().enumerate() {
                m[(0, j)] += &d[0] * kj;
            }
            debug_assert_eq!(m.det(), s);
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn allowability_examples() {
        assert!(is_allowable(&m(&[&[3]]), &m(&[&[2]])).unwrap());
        assert!(!is_allowable(&m(&[&[5]]), &m(&[&[2]])).unwrap());
        assert!(is_allowable(&IntMatrix::zeros(2, 2), &m(&[&[1, 1], &[0, 1]])).unwrap());
        assert!(!is_allowable(&IntMatrix::zeros(1, 1), &m(&[&[2]])).unwrap());
        assert!(is_allowable(&m(&[&[1, 0], &[0, 5]]), &m(&[&[1, 0], &[0, 2]])).unwrap());
    }

    #[test]
    fn ill_defined_maps_are_errors() {
        let b = m(&[&[2, 0], &[0, 4]]);
        let phi = m(&[&[1, 1], &[0, 1]]);
        assert!(is_allowable(&b, &phi).is_ok());
        let bad = m(&[&[1, 0], &[1, 1]]);
        assert!(matches!(is_allowable(&b, &bad), Err(Error::NotWellDefined(_))));
    }

    #[test]
    fn lift_times_two_mod_three() {
        let b = m(&[&[3]]);
        let (u, v) = lift_single(&b, &m(&[&[2]]), &IntMatrix::zeros(0, 0), 10).unwrap().found().unwrap();
        assert_eq!(u, m(&[&[-1]]));
        assert_eq!(v, m(&[&[-1]]));
    }

    #[test]
    fn lift_on_zero_block() {
        let b = IntMatrix::zeros(2, 2);
        let psi = m(&[&[1, 1], &[0, 1]]);
        let (u, v) = lift_single(&b, &IntMatrix::identity(2), &psi, 10).unwrap().found().unwrap();
        assert!(u.is_identity());
        assert_eq!(v.inverse_unimodular().unwrap(), psi);
    }

    #[test]
    fn lift_with_unit_invariant() {
        let b = m(&[&[1, 0], &[0, 3]]);
        let phi = m(&[&[1, 0], &[0, 2]]);
        let (u, v) = lift_single(&b, &phi, &IntMatrix::zeros(0, 0), 50).unwrap().found().unwrap();
        assert_eq!(&(&u * &b) * &v, b);
        assert!(u.det().abs().is_one());
    }

    #[test]
    fn non_allowable_is_absent() {
        let out = lift_single(&m(&[&[5]]), &m(&[&[2]]), &IntMatrix::zeros(0, 0), 10).unwrap();
        assert!(matches!(out, Lift::Absent(_)));
    }
}
