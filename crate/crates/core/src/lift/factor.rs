use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::Lift;
use crate::graphcore::Graph;
use crate::intlin::{int, Int, IntMatrix};
use crate::moves::{addition_step, chain, ChainStep, MoveCertificate};
use crate::posetblock::{BlockMatrix, Equivalence};
use crate::{Error, Result};

/// The basic elementary matrix `I + coeff·e_{row,col}` with `coeff = ±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transvection {
    pub row: usize,
    pub col: usize,
    pub coeff: i64,
}

impl Transvection {
    pub fn matrix(&self, n: usize) -> IntMatrix {
        let mut m = IntMatrix::identity(n);
        m[(self.row, self.col)] += int(self.coeff);
        m
    }

    pub fn inverse(self) -> Self {
        Transvection { coeff: -self.coeff, ..self }
    }
}

/// Unit-coefficient transvections whose product, in order, is `u`.
pub fn transvections(u: &BlockMatrix) -> Result<Vec<Transvection>> {
    if u.row_comp() != u.col_comp() || !u.is_slp() {
        return Err(Error::Precondition("factorization needs a matrix in SL_P".into()));
    }
    let p = u.poset();
    let labels = u.row_comp();
    let n = labels.len();
    let rank: Vec<usize> = (0..p.len()).map(|c| p.down(c).len()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (rank[labels[i]], labels[i]));
    let mut m = u.matrix().clone();
    // (s, t, c): row s += c·row t
    let mut ops: Vec<(usize, usize, Int)> = Vec::new();
    let mut apply = |m: &mut IntMatrix, s: usize, t: usize, c: Int| {
        if !c.is_zero() {
            m.add_row_multiple(s, t, &c);
            ops.push((s, t, c));
        }
    };
    for (pos, &j) in order.iter().enumerate() {
        let rows: Vec<usize> = order[pos..].iter().copied().filter(|&r| labels[r] == labels[j]).collect();
        loop {
            let nz: Vec<usize> = rows.iter().copied().filter(|&r| !m[(r, j)].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| m[(r, j)].abs()).expect("nonempty");
            for &r in &nz {
                if r != piv {
                    let q = -m[(r, j)].div_floor(&m[(piv, j)]);
                    apply(&mut m, r, piv, q);
                }
            }
        }
        let piv = rows
            .iter()
            .copied()
            .find(|&r| !m[(r, j)].is_zero())
            .ok_or_else(|| Error::InvalidCertificate("singular diagonal block".into()))?;
        if piv != j {
            apply(&mut m, j, piv, Int::one());
            let c = -(&m[(piv, j)] * &m[(j, j)]);
            apply(&mut m, piv, j, c);
        }
        if !m[(j, j)].is_one() {
            let Some(&q) = rows.iter().find(|&&r| r != j) else {
                return Err(Error::InvalidCertificate("diagonal block does not have determinant 1".into()));
            };
            apply(&mut m, q, j, int(-1));
            apply(&mut m, j, q, int(2));
            apply(&mut m, q, j, int(-1));
        }
        if !m[(j, j)].abs().is_one() {
            return Err(Error::InvalidCertificate("column has no unit pivot".into()));
        }
        for r in 0..n {
            if r != j && !m[(r, j)].is_zero() {
                let c = -m[(r, j)].clone();
                apply(&mut m, r, j, c);
            }
        }
    }
    debug_assert!(m.is_identity());
    let mut out = Vec::new();
    for (s, t, c) in ops {
        let k = c.abs().to_usize().ok_or_else(|| Error::InvalidCertificate("coefficient too large".into()))?;
        let coeff = if c.is_positive() { -1 } else { 1 };
        out.extend(std::iter::repeat_n(Transvection { row: s, col: t, coeff }, k));
    }
    let check = out.iter().fold(IntMatrix::identity(n), |acc, t| &acc * &t.matrix(n));
    if check != *u.matrix() {
        return Err(Error::InvalidCertificate("factor product differs from the input".into()));
    }
    Ok(out)
}

/// Basic elementary factors of an SL_P matrix; their product, in order, is `u`.
pub fn factor_slp(u: &BlockMatrix) -> Result<Vec<BlockMatrix>> {
    let n = u.row_comp().len();
    transvections(u)?
        .into_iter()
        .map(|t| u.with_matrix(t.matrix(n)))
        .collect()
}

/// A legal step reproducing one transvection on the graph: a positive
/// addition, or a positive addition run backwards.
pub(super) fn realize(g: &Graph, t: Transvection, row: bool) -> Result<Option<(Graph, ChainStep)>> {
    let (s, c) = (g.vertex(t.row).to_string(), g.vertex(t.col).to_string());
    let add = |h: &Graph| addition_step(h, &s, &c, row);
    if t.coeff > 0 {
        return Ok(add(g).ok().map(|(h, cert)| (h, ChainStep::forward(cert))));
    }
    let n = g.len();
    let b = g.b_matrix();
    let m = t.matrix(n);
    let bm = if row { &m * &b } else { &b * &m };
    let Ok(prev) = Graph::from_b_matrix(g.vertices().to_vec(), &bm) else {
        return Ok(None);
    };
    match add(&prev) {
        Ok((back, cert)) if back == *g => Ok(Some((prev, ChainStep::backward(cert)))),
        _ => Ok(None),
    }
}

/// Rewrites an SL_P-equivalence between `B_g` and a positive target as a chain
/// of legal positive additions (forward or backward). `None`-like results are
/// always inconclusive.
pub fn positive_factor(g: &Graph, e: &Equivalence, budget: u64) -> Result<Lift<MoveCertificate>> {
    if let Some(why) = e.check(true) {
        return Err(Error::Precondition(format!("positive factorization needs an SL_P-equivalence: {why}")));
    }
    if *e.source.matrix() != g.b_matrix() || e.source.row_comp().len() != g.len() {
        return Err(Error::Precondition("equivalence source is not the unpadded matrix of the graph".into()));
    }
    for (name, b) in [("source", &e.source), ("target", &e.target)] {
        if let Some(why) = b.mp_plus_failure() {
            return Err(Error::Precondition(format!("{name} is not in M_P^+: {why}")));
        }
    }
    let attempts = (budget / 100).clamp(1, 8);
    let mut last = String::new();
    for seed in 0..attempts {
        match super::descent::run_descent(g, e, budget, seed)? {
            Ok(steps) => {
                let c = chain(g, steps)?;
                if c.u != *e.u.matrix() || c.v != *e.v.matrix() || c.target.b_matrix() != *e.target.matrix() {
                    return Err(Error::InvalidCertificate("positive chain does not reproduce the equivalence".into()));
                }
                return Ok(Lift::Found(c));
            }
            Err(why) => last = why,
        }
    }
    Ok(Lift::Inconclusive(format!("{attempts} descents failed, the last {last}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::Poset;
    use crate::moves::row_add;

    #[test]
    fn identity_has_no_factors() {
        let p = Poset::from_pairs(1, &[]).unwrap();
        let u = BlockMatrix::identity(p, vec![0, 0]);
        assert!(factor_slp(&u).unwrap().is_empty());
    }

    #[test]
    fn unit_coefficient_factors() {
        let p = Poset::from_pairs(1, &[]).unwrap();
        let u = BlockMatrix::square(p, vec![0, 0], IntMatrix::from_rows(&[[1, 5], [0, 1]])).unwrap();
        let f = transvections(&u).unwrap();
        assert_eq!(f, vec![Transvection { row: 0, col: 1, coeff: 1 }; 5]);
    }

    #[test]
    fn negative_pivots_are_repaired() {
        let p = Poset::from_pairs(2, &[(0, 1)]).unwrap();
        let m = IntMatrix::from_rows(&[[-1, 0, 0], [0, -1, 0], [4, -3, 1]]);
        let u = BlockMatrix::square(p, vec![0, 0, 1], m.clone()).unwrap();
        let f = factor_slp(&u).unwrap();
        let prod = f.iter().fold(IntMatrix::identity(3), |acc, x| &acc * x.matrix());
        assert_eq!(prod, m);
        assert!(f.iter().all(|x| x.in_mp()));
    }

    #[test]
    fn single_row_add_is_recovered() {
        let g = Graph::new(
            vec!["x".into(), "y".into(), "z".into()],
            IntMatrix::from_rows(&[[2, 1, 1], [1, 2, 1], [1, 1, 3]]),
        )
        .unwrap();
        let (_, c) = row_add(&g, "x", "y").unwrap();
        let e = c.equivalence().unwrap();
        let chain = positive_factor(&g, &e, 50).unwrap().found().unwrap();
        assert_eq!(chain.u, c.u);
    }
}
