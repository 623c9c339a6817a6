use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{Int, IntMatrix};
use crate::error::{dim, Result};

/// `p * a * q = d` with `p`, `q` unimodular and `d` diagonal with a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let k = self.d.rows().min(self.d.cols());
        (0..k).take_while(|&i| !self.d[(i, i)].is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<Int> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }
}

fn min_abs_in(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let v = &d[(i, j)];
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d[(bi, bj)].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn min_abs_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs = d[(t, t)].abs();
    let consider = |i: usize, j: usize, best: &mut (usize, usize), best_abs: &mut Int| {
        let v = d[(i, j)].abs();
        if !v.is_zero() && (best_abs.is_zero() || v < *best_abs) {
            *best = (i, j);
            *best_abs = v;
        }
    };
    for i in t + 1..d.rows() {
        consider(i, t, &mut best, &mut best_abs);
    }
    for j in t + 1..d.cols() {
        consider(t, j, &mut best, &mut best_abs);
    }
    best
}

/// Smith normal form with transforms. Pivoting always picks the entry of
/// minimal absolute value (first in row-major order), so the result is
/// a deterministic function of the input.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut p = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = min_abs_in(&d, t) else { break };
        d.swap_rows(t, pi);
        p.swap_rows(t, pi);
        d.swap_cols(t, pj);
        q.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let k = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &k);
                p.add_row_multiple(i, t, &k);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let k = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &k);
                q.add_col_multiple(j, t, &k);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                let (pi, pj) = min_abs_cross(&d, t);
                d.swap_rows(t, pi);
                p.swap_rows(t, pi);
                d.swap_cols(t, pj);
                q.swap_cols(t, pj);
                continue;
            }
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    d.add_row_multiple(t, i, &Int::one());
                    p.add_row_multiple(t, i, &Int::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            p.negate_row(t);
        }
    }
    SmithDecomposition { p, q, d }
}

/// Columns form a basis of the integer null space of `a`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    kernel_from_snf(&s)
}

pub(crate) fn kernel_from_snf(s: &SmithDecomposition) -> IntMatrix {
    let r = s.rank();
    let cols: Vec<usize> = (r..s.q.cols()).collect();
    s.q.select_cols(&cols)
}

/// Integer solver for `a x = b` reusing one Smith decomposition of `a`.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    snf: SmithDecomposition,
    rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Int>,
    /// Columns span the homogeneous solutions.
    pub homogeneous: IntMatrix,
}

impl LinearSolver {
    pub fn new(a: &IntMatrix) -> Self {
        let snf = smith_normal_form(a);
        let rank = snf.rank();
        LinearSolver { snf, rank }
    }

    pub fn from_snf(snf: SmithDecomposition) -> Self {
        let rank = snf.rank();
        LinearSolver { snf, rank }
    }

    pub fn snf(&self) -> &SmithDecomposition {
        &self.snf
    }

    pub fn rows(&self) -> usize {
        self.snf.d.rows()
    }

    pub fn cols(&self) -> usize {
        self.snf.d.cols()
    }

    /// Particular solution only; `None` when no integer solution exists.
    pub fn particular(&self, b: &[Int]) -> Result<Option<Vec<Int>>> {
        if b.len() != self.rows() {
            return Err(dim(format!("right-hand side of length {} for {} equations", b.len(), self.rows())));
        }
        let pb = self.snf.p.mul_vec(b);
        let mut y = vec![Int::zero(); self.cols()];
        for (i, v) in pb.iter().enumerate() {
            if i < self.rank {
                let (quo, rem) = v.div_rem(&self.snf.d[(i, i)]);
                if !rem.is_zero() {
                    return Ok(None);
                }
                y[i] = quo;
            } else if !v.is_zero() {
                return Ok(None);
            }
        }
        Ok(Some(self.snf.q.mul_vec(&y)))
    }

    pub fn solve(&self, b: &[Int]) -> Result<Option<Solution>> {
        Ok(self
            .particular(b)?
            .map(|particular| Solution { particular, homogeneous: kernel_from_snf(&self.snf) }))
    }

    pub fn in_column_span(&self, b: &[Int]) -> bool {
        matches!(self.particular(b), Ok(Some(_)))
    }
}

/// Solves `a x = b` over the integers.
pub fn solve_linear(a: &IntMatrix, b: &[Int]) -> Result<Option<Solution>> {
    if b.len() != a.rows() {
        return Err(dim(format!("right-hand side of length {} for {} equations", b.len(), a.rows())));
    }
    LinearSolver::new(a).solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int;

    fn check(a: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(&(&s.p * a) * &s.q, s.d);
        assert!(s.p.is_unimodular() && s.q.is_unimodular());
        let diag = s.diagonal();
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn diag_two_three() {
        let s = check(&IntMatrix::from_rows(&[[2, 0], [0, 3]]));
        assert_eq!(s.diagonal(), vec![int(1), int(6)]);
    }

    #[test]
    fn identity_and_zero() {
        let s = check(&IntMatrix::identity(4));
        assert!(s.d.is_identity());
        let s = check(&IntMatrix::zeros(2, 3));
        assert!(s.d.is_zero());
    }

    #[test]
    fn upper_two_one() {
        let s = check(&IntMatrix::from_rows(&[[2, 1], [0, 2]]));
        assert_eq!(s.diagonal(), vec![int(1), int(4)]);
    }

    #[test]
    fn deterministic() {
        let a = IntMatrix::from_rows(&[[4, 6, -2], [3, 9, 12], [7, -1, 5]]);
        assert_eq!(smith_normal_form(&a), smith_normal_form(&a));
        check(&a);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&IntMatrix::from_rows(&[[0]])).cols(), 1);
        assert_eq!(kernel_basis(&IntMatrix::from_rows(&[[1]])).cols(), 0);
        let k = kernel_basis(&IntMatrix::from_rows(&[[2, 0], [1, 0]]));
        assert_eq!(k.cols(), 1);
        assert!(k[(0, 0)].is_zero());
        assert!(k[(1, 0)].abs().is_one());
    }

    #[test]
    fn solve_examples() {
        let s = solve_linear(&IntMatrix::from_rows(&[[2]]), &[int(4)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![int(2)]);
        assert!(solve_linear(&IntMatrix::from_rows(&[[2]]), &[int(3)]).unwrap().is_none());
        let s = solve_linear(&IntMatrix::from_rows(&[[1, 0], [0, 2]]), &[int(1), int(2)]).unwrap().unwrap();
        assert_eq!(s.particular, vec![int(1), int(1)]);
        assert_eq!(s.homogeneous.cols(), 0);
        assert!(solve_linear(&IntMatrix::from_rows(&[[1, 0]]), &[int(1), int(2)]).is_err());
    }
}
