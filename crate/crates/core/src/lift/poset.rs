use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::single::{lift_single_seeded, well_defined};
use super::Lift;
use crate::graphcore::{CompSet, Poset};
use crate::intlin::{int, kernel_basis, smith_normal_form, Int, IntMatrix, LinearSolver};
use crate::posetblock::{BlockMatrix, Equivalence};
use crate::{Error, Result};

/// Per-component isomorphisms `d[i]: cok B{i} → cok B′{i}` and optional kernel
/// isomorphisms `psi[i]: ker B{i} → ker B′{i}` in [`kernel_basis`] coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWebIso {
    pub d: Vec<IntMatrix>,
    #[serde(default)]
    pub psi: Vec<Option<IntMatrix>>,
}

fn coords(b: &BlockMatrix, i: usize) -> (Vec<usize>, Vec<usize>) {
    (b.rows_in(CompSet::singleton(i)), b.cols_in(CompSet::singleton(i)))
}

fn same_cokernel_map(target: &IntMatrix, x: &IntMatrix, y: &IntMatrix) -> bool {
    let solver = LinearSolver::new(target);
    let diff = x - y;
    (0..diff.cols()).all(|j| solver.in_column_span(&diff.col(j)))
}

/// `T` with `m·k1 = k2·T`, when it exists.
fn kernel_coordinates(k2: &IntMatrix, image: &IntMatrix) -> Option<IntMatrix> {
    let solver = LinearSolver::new(k2);
    let cols: Option<Vec<Vec<Int>>> = (0..image.cols()).map(|j| solver.particular(&image.col(j)).ok().flatten()).collect();
    let cols = cols?;
    Some(IntMatrix::from_columns(k2.cols(), &cols))
}

fn minimal(p: &Poset, i: usize) -> bool {
    (0..p.len()).all(|k| k == i || !p.lt(k, i))
}

impl KWebIso {
    /// The maps induced by an equivalence; kernel maps only on minimal components.
    pub fn induced(e: &Equivalence) -> Result<KWebIso> {
        let p = e.source.poset();
        let vinv = e.v.matrix().inverse_unimodular().ok_or_else(|| Error::InvalidCertificate("V is not invertible".into()))?;
        let mut d = Vec::new();
        let mut psi = Vec::new();
        for i in 0..p.len() {
            let (r1, c1) = coords(&e.source, i);
            let (r2, c2) = coords(&e.target, i);
            d.push(e.u.matrix().submatrix(&r2, &r1));
            if minimal(p, i) {
                let k1 = kernel_basis(&e.source.matrix().submatrix(&r1, &c1));
                let k2 = kernel_basis(&e.target.matrix().submatrix(&r2, &c2));
                let image = &vinv.submatrix(&c2, &c1) * &k1;
                let t = kernel_coordinates(&k2, &image)
                    .ok_or_else(|| Error::InvalidCertificate("V⁻¹ does not map kernels to kernels".into()))?;
                psi.push(Some(t));
            } else {
                psi.push(None);
            }
        }
        Ok(KWebIso { d, psi })
    }

    /// Every `d[i]` and `psi[i]` is an isomorphism, and the squares through the
    /// boundary maps `ker B{k} → cok B{i}` commute for covers `k ≺ i` with a kernel map.
    pub fn check(&self, b: &BlockMatrix, b2: &BlockMatrix) -> Result<()> {
        let p = b.poset();
        if self.d.len() != p.len() {
            return Err(Error::Dimension(format!("{} cokernel maps for {} components", self.d.len(), p.len())));
        }
        let mut kernels = Vec::new();
        for i in 0..p.len() {
            let (r1, c1) = coords(b, i);
            let (r2, c2) = coords(b2, i);
            let bi = b.matrix().submatrix(&r1, &c1);
            let b2i = b2.matrix().submatrix(&r2, &c2);
            let di = &self.d[i];
            if di.rows() != r2.len() || di.cols() != r1.len() {
                return Err(Error::Dimension(format!("cokernel map {i} has the wrong shape")));
            }
            let image = di * &bi;
            let solver = LinearSolver::new(&b2i);
            if (0..image.cols()).any(|j| !solver.in_column_span(&image.col(j))) {
                return Err(Error::NotWellDefined(format!("cokernel map {i}")));
            }
            let g1 = crate::intlin::cokernel(&bi);
            let g2 = crate::intlin::cokernel(&b2i);
            let h = crate::intlin::GroupHom::new(std::sync::Arc::new(g1), std::sync::Arc::new(g2), di.clone())?;
            if !h.is_isomorphism() {
                return Err(Error::Precondition(format!("cokernel map {i} is not an isomorphism")));
            }
            let k1 = kernel_basis(&bi);
            let k2 = kernel_basis(&b2i);
            if let Some(Some(t)) = self.psi.get(i) {
                if t.rows() != k2.cols() || t.cols() != k1.cols() || !t.is_unimodular() {
                    return Err(Error::Precondition(format!("kernel map {i} is not an isomorphism")));
                }
            }
            kernels.push((k1, k2));
        }
        for (k, i) in p.strict_pairs() {
            if !p.covers(k, i) {
                continue;
            }
            let Some(Some(t)) = self.psi.get(k) else { continue };
            let bik = b.matrix().submatrix(&coords(b, i).0, &coords(b, k).1);
            let b2ik = b2.matrix().submatrix(&coords(b2, i).0, &coords(b2, k).1);
            let (ri, ci) = coords(b2, i);
            let b2i = b2.matrix().submatrix(&ri, &ci);
            let left = &(&self.d[i] * &bik) * &kernels[k].0;
            let right = &(&b2ik * &kernels[k].1) * t;
            if !same_cokernel_map(&b2i, &left, &right) {
                return Err(Error::Precondition(format!("square through components {k} ≺ {i} does not commute")));
            }
        }
        Ok(())
    }

    /// Whether `other` induces the same maps (kernel maps compared where `self` has one).
    pub fn agrees_with(&self, other: &KWebIso, b2: &BlockMatrix) -> bool {
        if self.d.len() != other.d.len() {
            return false;
        }
        (0..self.d.len()).all(|i| {
            let (r2, c2) = coords(b2, i);
            let b2i = b2.matrix().submatrix(&r2, &c2);
            let same_d = self.d[i].rows() == other.d[i].rows()
                && self.d[i].cols() == other.d[i].cols()
                && same_cokernel_map(&b2i, &self.d[i], &other.d[i]);
            let same_psi = match (self.psi.get(i), other.psi.get(i)) {
                (Some(Some(a)), Some(Some(b))) => a == b,
                (Some(Some(_)), _) => false,
                _ => true,
            };
            same_d && same_psi
        })
    }
}

/// Pairs `k ≺ i` ordered so that every pair comes after the pairs of its sub-intervals.
fn pairs_by_interval(p: &Poset) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize, usize)> = p
        .strict_pairs()
        .into_iter()
        .map(|(k, i)| (k, i, (0..p.len()).filter(|&l| p.leq(k, l) && p.leq(l, i)).count()))
        .collect();
    pairs.sort_by_key(|&(k, i, size)| (size, i, k));
    pairs.into_iter().map(|(k, i, _)| (k, i)).collect()
}

fn random_combination(base: &[Int], hom: &IntMatrix, rng: &mut ChaCha8Rng) -> Vec<Int> {
    let mut x = base.to_vec();
    for c in 0..hom.cols() {
        let coef = int(rng.gen_range(-2..=2));
        if coef.is_zero() {
            continue;
        }
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += &hom[(r, c)] * &coef;
        }
    }
    x
}

fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Subtracts the nearest multiple of `h` from `v` when that shortens it.
fn reduce_by(v: &mut [Int], h: &[Int]) -> bool {
    let hh = dot(h, h);
    if hh.is_zero() {
        return false;
    }
    // round(<v,h> / <h,h>)
    let k = (dot(v, h) * int(2) + &hh).div_floor(&(&hh * int(2)));
    if k.is_zero() {
        return false;
    }
    let w: Vec<Int> = v.iter().zip(h).map(|(x, y)| x - &k * y).collect();
    if dot(&w, &w) >= dot(v, v) {
        return false;
    }
    v.clone_from_slice(&w);
    true
}

/// Pairwise size reduction of the solution lattice, then of the particular
/// solution against it. Not a reduced basis in any strict sense.
fn shorten(particular: &[Int], hom: &IntMatrix) -> (Vec<Int>, IntMatrix) {
    let mut hs: Vec<Vec<Int>> = (0..hom.cols()).map(|c| hom.col(c)).collect();
    for _ in 0..64 {
        let mut changed = false;
        for i in 0..hs.len() {
            for j in 0..hs.len() {
                if i != j {
                    let hj = hs[j].clone();
                    changed |= reduce_by(&mut hs[i], &hj);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut x = particular.to_vec();
    for _ in 0..64 {
        let mut changed = false;
        for h in &hs {
            changed |= reduce_by(&mut x, h);
        }
        if !changed {
            break;
        }
    }
    (x, IntMatrix::from_columns(particular.len(), &hs))
}

/// A GL_P-equivalence `b → b2` inducing `kweb` on the diagonal blocks.
pub fn lift_poset(b: &BlockMatrix, b2: &BlockMatrix, kweb: &KWebIso, budget: u64, seed: u64) -> Result<Lift<Equivalence>> {
    let p = b.poset();
    if p != b2.poset() {
        return Err(Error::Dimension("block matrices over different posets".into()));
    }
    if b.row_index() != b2.row_index() || b.col_index() != b2.col_index() || b.row_index() != b.col_index() {
        return Err(Error::Dimension("lifting needs equal square multiindices".into()));
    }
    kweb.check(b, b2)?;
    let k = p.len();
    let n = b.matrix().rows();
    for i in 0..k {
        let (r1, c1) = coords(b, i);
        let (r2, c2) = coords(b2, i);
        let s1 = smith_normal_form(&b.matrix().submatrix(&r1, &c1)).diagonal();
        let s2 = smith_normal_form(&b2.matrix().submatrix(&r2, &c2)).diagonal();
        if s1 != s2 {
            return Ok(Lift::Absent(format!("diagonal blocks {i} have different Smith forms")));
        }
    }
    let pairs = pairs_by_interval(p);
    let mut last_failure = String::from("no attempt made");
    for attempt in 0..budget.max(1) {
        let attempt_seed = seed.wrapping_mul(1_000_003).wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed);
        let plain = attempt == 0 && seed == 0;
        let mut u = IntMatrix::zeros(n, n);
        let mut v = IntMatrix::zeros(n, n);
        for i in 0..k {
            match diagonal_lift(b, b2, kweb, i, budget, if plain { 0 } else { attempt_seed | 1 }, &mut rng)? {
                Lift::Found((ui, vi)) => {
                    let (r1, c1) = coords(b, i);
                    let (r2, c2) = coords(b2, i);
                    place(&mut u, &r2, &r1, &ui);
                    place(&mut v, &c1, &c2, &vi);
                }
                Lift::Absent(why) => return Ok(Lift::Absent(why)),
                Lift::Inconclusive(why) => {
                    last_failure = why;
                    continue;
                }
            }
        }
        let mut ok = true;
        for &(lo, hi) in &pairs {
            let r2_hi = coords(b2, hi).0;
            let r1_lo = coords(b, lo).0;
            let c2_lo = coords(b2, lo).1;
            let c1_hi = coords(b, hi).1;
            let bv = b.matrix() * &v;
            let ub = &u * b.matrix();
            let pm = bv.submatrix(&r1_lo, &c2_lo);
            let qm = ub.submatrix(&r2_hi, &c1_hi);
            let current = &ub * &v;
            let rhs_m = &b2.matrix().submatrix(&r2_hi, &c2_lo) - &current.submatrix(&r2_hi, &c2_lo);
            let (ni, nk) = (r2_hi.len(), c2_lo.len());
            let (nu, nv) = (r1_lo.len(), c1_hi.len());
            let unknowns = ni * nu + nv * nk;
            let mut sys = IntMatrix::zeros(ni * nk, unknowns);
            let mut rhs = Vec::with_capacity(ni * nk);
            for a in 0..ni {
                for bb in 0..nk {
                    let row = a * nk + bb;
                    for c in 0..nu {
                        sys[(row, a * nu + c)] = pm[(c, bb)].clone();
                    }
                    for c in 0..nv {
                        sys[(row, ni * nu + c * nk + bb)] = qm[(a, c)].clone();
                    }
                    rhs.push(rhs_m[(a, bb)].clone());
                }
            }
            let solver = LinearSolver::new(&sys);
            let Some(sol) = solver.solve(&rhs)? else {
                ok = false;
                last_failure = format!("off-diagonal equations for components {lo} ≺ {hi} have no solution");
                break;
            };
            let (short, basis) = shorten(&sol.particular, &sol.homogeneous);
            let x = if plain { short } else { random_combination(&short, &basis, &mut rng) };
            for a in 0..ni {
                for c in 0..nu {
                    u[(r2_hi[a], r1_lo[c])] = x[a * nu + c].clone();
                }
            }
            for c in 0..nv {
                for bb in 0..nk {
                    v[(c1_hi[c], c2_lo[bb])] = x[ni * nu + c * nk + bb].clone();
                }
            }
        }
        if !ok {
            continue;
        }
        let ub = BlockMatrix::new(p.clone(), b2.row_comp().to_vec(), b.row_comp().to_vec(), u)?;
        let vb = BlockMatrix::new(p.clone(), b.col_comp().to_vec(), b2.col_comp().to_vec(), v)?;
        let e = Equivalence { u: ub, v: vb, source: b.clone(), target: b2.clone() };
        if let Some(why) = e.check(false) {
            return Err(Error::InvalidCertificate(format!("lifted equivalence fails: {why}")));
        }
        if !kweb.agrees_with(&KWebIso::induced(&e)?, b2) {
            return Err(Error::InvalidCertificate("lifted equivalence induces different maps".into()));
        }
        return Ok(Lift::Found(e));
    }
    Ok(Lift::Inconclusive(format!("budget of {budget} attempts exhausted: {last_failure}")))
}

fn place(m: &mut IntMatrix, rows: &[usize], cols: &[usize], block: &IntMatrix) {
    for (a, &r) in rows.iter().enumerate() {
        for (c, &col) in cols.iter().enumerate() {
            m[(r, col)] = block[(a, c)].clone();
        }
    }
}

/// Lifts the maps on component `i` after moving `b{i}` onto `b2{i}` through Smith forms.
fn diagonal_lift(
    b: &BlockMatrix,
    b2: &BlockMatrix,
    kweb: &KWebIso,
    i: usize,
    budget: u64,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Lift<(IntMatrix, IntMatrix)>> {
    let (r1, c1) = coords(b, i);
    let (r2, c2) = coords(b2, i);
    let bi = b.matrix().submatrix(&r1, &c1);
    let b2i = b2.matrix().submatrix(&r2, &c2);
    let s1 = smith_normal_form(&bi);
    let s2 = smith_normal_form(&b2i);
    let p2inv = s2.p.inverse_unimodular().expect("unimodular");
    let q2inv = s2.q.inverse_unimodular().expect("unimodular");
    let x = &p2inv * &s1.p;
    let y = &s1.q * &q2inv;
    let xinv = x.inverse_unimodular().expect("unimodular");
    let yinv = y.inverse_unimodular().expect("unimodular");
    let phi = &xinv * &kweb.d[i];
    well_defined(&bi, &phi)?;
    let k1 = kernel_basis(&bi);
    let k2 = kernel_basis(&b2i);
    let z = kernel_coordinates(&k2, &(&yinv * &k1)).ok_or_else(|| Error::InvalidCertificate("kernel transport failed".into()))?;
    let psi0 = match kweb.psi.get(i) {
        Some(Some(t)) => {
            let zinv = z.inverse_unimodular().ok_or_else(|| Error::InvalidCertificate("kernel transport is not invertible".into()))?;
            &zinv * t
        }
        _ => random_kernel_automorphism(k1.cols(), seed, rng),
    };
    Ok(lift_single_seeded(&bi, &phi, &psi0, budget, seed)?.map(|(u0, v0)| (&x * &u0, &v0 * &y)))
}

fn random_kernel_automorphism(k: usize, seed: u64, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut m = IntMatrix::identity(k);
    if seed == 0 || k < 2 {
        return m;
    }
    for _ in 0..k {
        let (a, c) = (rng.gen_range(0..k), rng.gen_range(0..k));
        if a != c {
            m.add_row_multiple(a, c, &int(rng.gen_range(-1..=1)));
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_chain() -> Poset {
        Poset::from_pairs(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn identity_lift() {
        let b = BlockMatrix::square(two_chain(), vec![0, 1], IntMatrix::from_rows(&[[2, 0], [1, 2]])).unwrap();
        let kweb = KWebIso { d: vec![IntMatrix::identity(1), IntMatrix::identity(1)], psi: vec![None, None] };
        let e = lift_poset(&b, &b, &kweb, 20, 0).unwrap().found().unwrap();
        assert!(e.verify(false));
    }

    #[test]
    fn round_trip_two_components() {
        let b = BlockMatrix::square(two_chain(), vec![0, 1], IntMatrix::from_rows(&[[2, 0], [1, 2]])).unwrap();
        let u = BlockMatrix::square(two_chain(), vec![0, 1], IntMatrix::from_rows(&[[1, 0], [3, -1]])).unwrap();
        let v = BlockMatrix::square(two_chain(), vec![0, 1], IntMatrix::from_rows(&[[-1, 0], [2, 1]])).unwrap();
        let b2 = u.checked_mul(&b).unwrap().checked_mul(&v).unwrap();
        let e0 = Equivalence { u, v, source: b.clone(), target: b2.clone() };
        assert!(e0.verify(false));
        let kweb = KWebIso::induced(&e0).unwrap();
        let e = lift_poset(&b, &b2, &kweb, 50, 0).unwrap().found().unwrap();
        assert!(kweb.agrees_with(&KWebIso::induced(&e).unwrap(), &b2));
    }

    #[test]
    fn non_allowable_component() {
        let p = Poset::from_pairs(1, &[]).unwrap();
        let b = BlockMatrix::square(p, vec![0], IntMatrix::from_rows(&[[5]])).unwrap();
        let kweb = KWebIso { d: vec![IntMatrix::from_rows(&[[2]])], psi: vec![None] };
        assert!(matches!(lift_poset(&b, &b, &kweb, 20, 0).unwrap(), Lift::Absent(_)));
    }
}
