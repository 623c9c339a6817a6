use std::sync::Arc;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{FKInvariant, FKIso};
use crate::intlin::{kernel_basis, FinAbPresentation, GroupHom, Int, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub isomorphic_possible: bool,
    pub witness_rho: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found(FKIso),
    /// No poset isomorphism matches the groups: definitive.
    NotIsomorphic,
    /// Budget exhausted.
    Inconclusive,
}

fn same(a: &FinAbPresentation, b: &FinAbPresentation) -> bool {
    a.is_isomorphic_to(b)
}

fn point_compatible(inv1: &FKInvariant, inv2: &FKInvariant, p: usize, q: usize) -> bool {
    let (s1, s2) = (inv1.simple(p), inv2.simple(q));
    same(&s1.k0, &s2.k0)
        && s1.k1.generators() == s2.k1.generators()
        && inv1.down(p).len() == inv2.down(q).len()
        && same(inv1.k0_open(inv1.down(p)).unwrap(), inv2.k0_open(inv2.down(q)).unwrap())
        && same(inv1.k0_open(inv1.boundary(p)).unwrap(), inv2.k0_open(inv2.boundary(q)).unwrap())
}

/// Poset isomorphisms under which all corresponding groups have equal
/// invariant factors, in lexicographic order, at most `limit` of them.
pub fn poset_isomorphisms(inv1: &FKInvariant, inv2: &FKInvariant, limit: usize) -> Vec<Vec<usize>> {
    let k = inv1.len();
    if k != inv2.len() || !same(inv1.total(), inv2.total()) || inv1.c_pairs().len() != inv2.c_pairs().len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut rho = Vec::with_capacity(k);
    let mut used = vec![false; k];
    fn rec(
        inv1: &FKInvariant,
        inv2: &FKInvariant,
        rho: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let p = rho.len();
        if p == inv1.len() {
            out.push(rho.clone());
            return;
        }
        for q in 0..inv2.len() {
            if used[q] || !point_compatible(inv1, inv2, p, q) {
                continue;
            }
            let order_ok = rho.iter().enumerate().all(|(p2, &q2)| {
                inv1.poset().leq(p2, p) == inv2.poset().leq(q2, q) && inv1.poset().leq(p, p2) == inv2.poset().leq(q, q2)
            });
            if !order_ok {
                continue;
            }
            used[q] = true;
            rho.push(q);
            rec(inv1, inv2, rho, used, out, limit);
            rho.pop();
            used[q] = false;
        }
    }
    rec(inv1, inv2, &mut rho, &mut used, &mut out, limit);
    out
}

pub fn compare_necessary(inv1: &FKInvariant, inv2: &FKInvariant) -> Comparison {
    let rho = poset_isomorphisms(inv1, inv2, 1).pop();
    Comparison { isomorphic_possible: rho.is_some(), witness_rho: rho }
}

/// Coordinates on the nontrivial cyclic summands of a presented group.
struct Frame {
    d: Vec<Int>,
    coords: IntMatrix,
    gens: IntMatrix,
    diag: Arc<FinAbPresentation>,
}

impl Frame {
    fn of(g: &FinAbPresentation) -> Self {
        let moduli = g.moduli();
        let keep: Vec<usize> = (0..moduli.len()).filter(|&i| moduli[i] != Int::from(1)).collect();
        let d: Vec<Int> = keep.iter().map(|&i| moduli[i].clone()).collect();
        let coords = g.snf().p.select_rows(&keep);
        let gens = IntMatrix::from_columns(g.generators(), &g.snf_generators());
        let diag = Arc::new(FinAbPresentation::unlabeled(IntMatrix::diagonal(&d)));
        Frame { d, coords, gens, diag }
    }

    fn r(&self) -> usize {
        self.d.len()
    }
}

struct Unknown {
    dom: Frame,
    cod: Frame,
    offset: usize,
}

impl Unknown {
    fn var(&self, i: usize, j: usize) -> usize {
        self.offset + i * self.dom.r() + j
    }
}

struct Square {
    a: usize,
    b: usize,
    f: IntMatrix,
    f2: IntMatrix,
}

fn reduce(v: &mut [Int], moduli: &[Int]) {
    for (x, m) in v.iter_mut().zip(moduli) {
        if !m.is_zero() {
            *x = x.mod_floor(m);
        }
    }
}

/// Row echelon form over the integers (same row lattice), zero rows dropped.
fn echelon(mut rows: Vec<Vec<Int>>, ncols: usize) -> Vec<Vec<Int>> {
    let n = rows.len();
    let mut piv = 0;
    for c in 0..ncols {
        while let Some(m) = (piv..n).filter(|&r| !rows[r][c].is_zero()).min_by_key(|&r| rows[r][c].abs()) {
            rows.swap(piv, m);
            let mut clear = true;
            for r in piv + 1..n {
                if !rows[r][c].is_zero() {
                    let q = rows[r][c].div_floor(&rows[piv][c]);
                    let (top, rest) = rows.split_at_mut(r);
                    for (x, y) in rest[0].iter_mut().zip(&top[piv]) {
                        *x -= &q * y;
                    }
                    clear &= rows[r][c].is_zero();
                }
            }
            if clear {
                if rows[piv][c].is_negative() {
                    rows[piv].iter_mut().for_each(|x| *x = -&*x);
                }
                piv += 1;
                break;
            }
        }
        if piv == n {
            break;
        }
    }
    rows.truncate(piv);
    rows
}

struct Search<'a> {
    inv1: &'a FKInvariant,
    inv2: &'a FKInvariant,
    rho: Vec<usize>,
    unknowns: Vec<Unknown>,
    nvars: usize,
    moduli: Vec<Int>,
}

impl<'a> Search<'a> {
    fn new(inv1: &'a FKInvariant, inv2: &'a FKInvariant, rho: Vec<usize>) -> Self {
        let mut pairs: Vec<(Arc<FinAbPresentation>, Arc<FinAbPresentation>)> = Vec::new();
        for (i, &o) in inv1.opens().iter().enumerate() {
            let j = inv2.open_index(o.map(|p| rho[p])).expect("poset isomorphism maps opens to opens");
            pairs.push((inv1.open(i).k0.clone(), inv2.open(j).k0.clone()));
        }
        for p in 0..inv1.len() {
            pairs.push((inv1.simple(p).k0.clone(), inv2.simple(rho[p]).k0.clone()));
        }
        for p in 0..inv1.len() {
            pairs.push((inv1.simple(p).k1.clone(), inv2.simple(rho[p]).k1.clone()));
        }
        let mut offset = 0;
        let mut moduli = Vec::new();
        let unknowns: Vec<Unknown> = pairs
            .iter()
            .map(|(a, b)| {
                let u = Unknown { dom: Frame::of(a), cod: Frame::of(b), offset };
                offset += u.dom.r() * u.cod.r();
                for i in 0..u.cod.r() {
                    moduli.extend(std::iter::repeat_n(u.cod.d[i].clone(), u.dom.r()));
                }
                u
            })
            .collect();
        Search { inv1, inv2, rho, unknowns, nvars: offset, moduli }
    }

    fn open_unknown(&self, s: crate::graphcore::CompSet) -> usize {
        self.inv1.open_index(s).expect("listed open")
    }

    fn squares(&self) -> Vec<Square> {
        let (inv1, inv2) = (self.inv1, self.inv2);
        let no = inv1.opens().len();
        let k = inv1.len();
        let mut out = Vec::new();
        for p in 0..k {
            let q = self.rho[p];
            let (s1, s2) = (inv1.sequence(p), inv2.sequence(q));
            let dn = self.open_unknown(inv1.down(p));
            let bd = self.open_unknown(inv1.boundary(p));
            out.push(Square { a: no + k + p, b: bd, f: s1.index.matrix().clone(), f2: s2.index.matrix().clone() });
            out.push(Square { a: bd, b: dn, f: s1.incl.matrix().clone(), f2: s2.incl.matrix().clone() });
            out.push(Square { a: dn, b: no + p, f: s1.quot.matrix().clone(), f2: s2.quot.matrix().clone() });
        }
        for (i, &(p, q)) in inv1.c_pairs().iter().enumerate() {
            let pair = (self.rho[p], self.rho[q]);
            let i2 = inv2.c_pairs().iter().position(|&c| c == pair).expect("isomorphism maps pairs");
            out.push(Square {
                a: self.open_unknown(inv1.down(p)),
                b: self.open_unknown(inv1.boundary(q)),
                f: inv1.c_map(i).matrix().clone(),
                f2: inv2.c_map(i2).matrix().clone(),
            });
        }
        out
    }

    /// Generators of the lattice of hom families commuting with every square, modulo zero maps.
    fn lattice(&self) -> Vec<Vec<Int>> {
        let mut eqs: Vec<(Vec<(usize, Int)>, Int)> = Vec::new();
        for u in &self.unknowns {
            for i in 0..u.cod.r() {
                for j in 0..u.dom.r() {
                    if !u.dom.d[j].is_zero() {
                        eqs.push((vec![(u.var(i, j), u.dom.d[j].clone())], u.cod.d[i].clone()));
                    }
                }
            }
        }
        for sq in self.squares() {
            let (ua, ub) = (&self.unknowns[sq.a], &self.unknowns[sq.b]);
            let fs = &(&ub.dom.coords * &sq.f) * &ua.dom.gens;
            let fs2 = &(&ub.cod.coords * &sq.f2) * &ua.cod.gens;
            for i in 0..ub.cod.r() {
                for j in 0..ua.dom.r() {
                    let mut terms = Vec::new();
                    for kk in 0..ub.dom.r() {
                        if !fs[(kk, j)].is_zero() {
                            terms.push((ub.var(i, kk), fs[(kk, j)].clone()));
                        }
                    }
                    for kk in 0..ua.cod.r() {
                        if !fs2[(i, kk)].is_zero() {
                            terms.push((ua.var(kk, j), -&fs2[(i, kk)]));
                        }
                    }
                    eqs.push((terms, ub.cod.d[i].clone()));
                }
            }
        }
        let slack: usize = eqs.iter().filter(|(_, m)| !m.is_zero()).count();
        let cols = self.nvars + slack;
        let mut sys = IntMatrix::zeros(eqs.len(), cols);
        let mut s = self.nvars;
        for (r, (terms, m)) in eqs.iter().enumerate() {
            for (v, c) in terms {
                sys[(r, *v)] += c;
            }
            if !m.is_zero() {
                sys[(r, s)] = -m;
                s += 1;
            }
        }
        let k = if eqs.is_empty() { IntMatrix::identity(cols) } else { kernel_basis(&sys) };
        let mut gens: Vec<Vec<Int>> = (0..k.cols())
            .map(|j| {
                let mut v = k.col(j)[..self.nvars].to_vec();
                reduce(&mut v, &self.moduli);
                v
            })
            .filter(|v| v.iter().any(|x| !x.is_zero()))
            .collect();
        gens = echelon(gens, self.nvars);
        for g in gens.iter_mut() {
            reduce(g, &self.moduli);
        }
        gens.retain(|v| v.iter().any(|x| !x.is_zero()));
        gens
    }

    fn matrices(&self, v: &[Int]) -> Vec<IntMatrix> {
        self.unknowns
            .iter()
            .map(|u| IntMatrix::from_fn(u.cod.r(), u.dom.r(), |i, j| v[u.var(i, j)].clone()))
            .collect()
    }

    fn all_isomorphisms(&self, ms: &[IntMatrix]) -> bool {
        self.unknowns.iter().zip(ms).all(|(u, m)| {
            GroupHom::new(u.dom.diag.clone(), u.cod.diag.clone(), m.clone()).is_ok_and(|h| h.is_isomorphism())
        })
    }

    fn assemble(&self, ms: &[IntMatrix]) -> FKIso {
        let gen: Vec<IntMatrix> = self
            .unknowns
            .iter()
            .zip(ms)
            .map(|(u, m)| &(&u.cod.gens * m) * &u.dom.coords)
            .collect();
        let no = self.inv1.opens().len();
        let k = self.inv1.len();
        FKIso {
            rho: self.rho.clone(),
            k0_open: gen[..no].to_vec(),
            k0_simple: gen[no..no + k].to_vec(),
            k1_simple: gen[no + k..].to_vec(),
            total: None,
        }
    }

    fn identity_guess(&self) -> Option<FKIso> {
        let no = self.inv1.opens().len();
        let k = self.inv1.len();
        let mut ms = Vec::new();
        for (i, &o) in self.inv1.opens().iter().enumerate() {
            let j = self.inv2.open_index(o.map(|p| self.rho[p]))?;
            let (a, b) = (self.inv1.open(i), self.inv2.open(j));
            if a.vertices.len() != b.vertices.len() {
                return None;
            }
            ms.push(IntMatrix::identity(a.vertices.len()));
        }
        for p in 0..k {
            let (a, b) = (self.inv1.simple(p), self.inv2.simple(self.rho[p]));
            if a.vertices.len() != b.vertices.len() {
                return None;
            }
            ms.push(IntMatrix::identity(a.vertices.len()));
        }
        for p in 0..k {
            let (a, b) = (self.inv1.simple(p), self.inv2.simple(self.rho[p]));
            if a.k1_basis != b.k1_basis {
                return None;
            }
            ms.push(IntMatrix::identity(a.k1_basis.cols()));
        }
        debug_assert_eq!(ms.len(), no + 2 * k);
        Some(FKIso {
            rho: self.rho.clone(),
            k0_open: ms[..no].to_vec(),
            k0_simple: ms[no..no + k].to_vec(),
            k1_simple: ms[no + k..].to_vec(),
            total: None,
        })
    }
}

/// Bounded search for an FK isomorphism. Candidates are drawn from the
/// lattice of commuting hom families in a fixed seeded order; every returned
/// isomorphism has been verified.
pub fn find_fk_iso(inv1: &FKInvariant, inv2: &FKInvariant, budget: u64, seed: u64) -> SearchOutcome {
    let budget = budget.max(1);
    let rhos = poset_isomorphisms(inv1, inv2, budget as usize);
    if rhos.is_empty() {
        return SearchOutcome::NotIsomorphic;
    }
    let mut spent = 0u64;
    let per_rho = (budget / rhos.len() as u64).max(1);
    for rho in rhos {
        let search = Search::new(inv1, inv2, rho);
        spent += 1;
        if let Some(iso) = search.identity_guess() {
            if iso.check(inv1, inv2).is_ok() {
                return SearchOutcome::Found(iso);
            }
        }
        let basis = search.lattice();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let try_vector = |v: &[Int]| -> Option<FKIso> {
            let ms = search.matrices(v);
            if !search.all_isomorphisms(&ms) {
                return None;
            }
            let iso = search.assemble(&ms);
            iso.check(inv1, inv2).is_ok().then_some(iso)
        };
        let mut local = 0u64;
        if basis.is_empty() {
            if let Some(iso) = try_vector(&vec![Int::zero(); search.nvars]) {
                return SearchOutcome::Found(iso);
            }
            continue;
        }
        // single generators and their sums first, then random combinations
        let mut sum = vec![Int::zero(); search.nvars];
        for b in &basis {
            for (x, y) in sum.iter_mut().zip(b) {
                *x += y;
            }
        }
        let mut fixed: Vec<Vec<Int>> = vec![sum];
        fixed.extend(basis.iter().cloned());
        for v in &fixed {
            if local >= per_rho || spent >= budget {
                break;
            }
            local += 1;
            spent += 1;
            let mut v = v.clone();
            reduce(&mut v, &search.moduli);
            if let Some(iso) = try_vector(&v) {
                return SearchOutcome::Found(iso);
            }
        }
        while local < per_rho && spent < budget {
            local += 1;
            spent += 1;
            let mut v = vec![Int::zero(); search.nvars];
            for b in &basis {
                let c: i64 = rng.gen_range(-2..=2);
                if c != 0 {
                    let c = Int::from(c);
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += &c * y;
                    }
                }
            }
            reduce(&mut v, &search.moduli);
            if let Some(iso) = try_vector(&v) {
                return SearchOutcome::Found(iso);
            }
        }
        if spent >= budget {
            break;
        }
    }
    SearchOutcome::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fk::fk_invariant;
    use crate::graphcore::Graph;

    #[test]
    fn o2_vs_o3() {
        let a = fk_invariant(&Graph::bouquet(2)).unwrap();
        let b = fk_invariant(&Graph::bouquet(3)).unwrap();
        assert!(!compare_necessary(&a, &b).isomorphic_possible);
        assert!(compare_necessary(&b, &b).isomorphic_possible);
        assert!(matches!(find_fk_iso(&a, &b, 100, 0), SearchOutcome::NotIsomorphic));
    }

    #[test]
    fn identical_gives_identity() {
        let g = Graph::from_edges(&["a", "b"], &[("a", "a", 3), ("b", "b", 3), ("b", "a", 1)]).unwrap();
        let inv = fk_invariant(&g).unwrap();
        match find_fk_iso(&inv, &inv, 100, 0) {
            SearchOutcome::Found(iso) => assert!(iso.k0_open.iter().all(IntMatrix::is_identity)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_mismatch() {
        let chain = Graph::from_edges(&["a", "b"], &[("a", "a", 3), ("b", "b", 3), ("b", "a", 1)]).unwrap();
        let anti = Graph::from_edges(&["a", "b"], &[("a", "a", 3), ("b", "b", 3)]).unwrap();
        let (x, y) = (fk_invariant(&chain).unwrap(), fk_invariant(&anti).unwrap());
        assert!(!compare_necessary(&x, &y).isomorphic_possible);
    }

    #[test]
    fn finds_nonidentity_iso() {
        let g = Graph::from_edges(&["a"], &[("a", "a", 6)]).unwrap();
        let h = Graph::from_edges(&["x", "y"], &[("x", "x", 2), ("x", "y", 1), ("y", "x", 5), ("y", "y", 1)]).unwrap();
        let (a, b) = (fk_invariant(&g).unwrap(), fk_invariant(&h).unwrap());
        assert!(compare_necessary(&a, &b).isomorphic_possible);
        match find_fk_iso(&a, &b, 1000, 7) {
            SearchOutcome::Found(iso) => assert!(iso.check(&a, &b).is_ok()),
            other => panic!("{other:?}"),
        }
    }
}
