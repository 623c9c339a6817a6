use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::FKInvariant;
use crate::error::{Error, Result};
use crate::graphcore::CompSet;
use crate::intlin::{FinAbPresentation, GroupHom, Int, IntMatrix};
use crate::posetblock::{BlockMatrix, Equivalence};

/// Isomorphism of reduced filtered K-theory, with each κ stored as a matrix
/// in generator coordinates. `k0_open[i]` acts on the `i`th open of the
/// domain and lands in the image open under `rho`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FKIso {
    pub rho: Vec<usize>,
    pub k0_open: Vec<IntMatrix>,
    pub k0_simple: Vec<IntMatrix>,
    pub k1_simple: Vec<IntMatrix>,
    /// κ on K0 of the whole graph, present when the iso comes from matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total: Option<IntMatrix>,
}

fn agree(codomain: &FinAbPresentation, l: &IntMatrix, r: &IntMatrix) -> bool {
    let d = l - r;
    (0..d.cols()).all(|j| codomain.is_zero(&d.col(j)))
}

fn hom(dom: &Arc<FinAbPresentation>, cod: &Arc<FinAbPresentation>, m: &IntMatrix, what: &str) -> Result<GroupHom> {
    let h = GroupHom::new(dom.clone(), cod.clone(), m.clone())
        .map_err(|e| Error::InvalidCertificate(format!("{what}: {e}")))?;
    if !h.is_isomorphism() {
        return Err(Error::InvalidCertificate(format!("{what} is not an isomorphism")));
    }
    Ok(h)
}

impl FKIso {
    pub fn identity(inv: &FKInvariant) -> Self {
        FKIso {
            rho: (0..inv.len()).collect(),
            k0_open: inv.open_data.iter().map(|d| IntMatrix::identity(d.k0.generators())).collect(),
            k0_simple: inv.simple.iter().map(|d| IntMatrix::identity(d.k0.generators())).collect(),
            k1_simple: inv.simple.iter().map(|d| IntMatrix::identity(d.k1.generators())).collect(),
            total: Some(IntMatrix::identity(inv.total.generators())),
        }
    }

    pub fn image(&self, s: CompSet) -> CompSet {
        s.map(|p| self.rho[p])
    }

    fn target_open(&self, inv1: &FKInvariant, inv2: &FKInvariant, i: usize) -> Result<usize> {
        inv2.open_index(self.image(inv1.opens[i]))
            .ok_or_else(|| Error::InvalidCertificate(format!("open set {i} has no image open")))
    }

    /// Located reason the isomorphism fails, if any.
    pub fn check(&self, inv1: &FKInvariant, inv2: &FKInvariant) -> Result<()> {
        if !inv1.poset.is_isomorphism(&inv2.poset, &self.rho) {
            return Err(Error::InvalidCertificate("rho is not a poset isomorphism".into()));
        }
        if self.k0_open.len() != inv1.opens.len()
            || self.k0_simple.len() != inv1.len()
            || self.k1_simple.len() != inv1.len()
        {
            return Err(Error::InvalidCertificate("wrong number of κ maps".into()));
        }
        let mut k0o = Vec::with_capacity(self.k0_open.len());
        for (i, m) in self.k0_open.iter().enumerate() {
            let j = self.target_open(inv1, inv2, i)?;
            k0o.push(hom(&inv1.open_data[i].k0, &inv2.open_data[j].k0, m, &format!("κ0 on open {i}"))?);
        }
        let mut k0s = Vec::new();
        let mut k1s = Vec::new();
        for p in 0..inv1.len() {
            let q = self.rho[p];
            k0s.push(hom(&inv1.simple[p].k0, &inv2.simple[q].k0, &self.k0_simple[p], &format!("κ0 at point {p}"))?);
            k1s.push(hom(&inv1.simple[p].k1, &inv2.simple[q].k1, &self.k1_simple[p], &format!("κ1 at point {p}"))?);
        }
        let at = |s: CompSet| inv1.open_index(s).expect("listed open");
        let fail = |what: String| Err(Error::InvalidCertificate(what));
        for p in 0..inv1.len() {
            let q = self.rho[p];
            let (s1, s2) = (&inv1.seq[p], &inv2.seq[q]);
            let dn = &k0o[at(inv1.down(p))];
            let bd = &k0o[at(inv1.boundary(p))];
            if !agree(
                s2.index.codomain(),
                &(bd.matrix() * s1.index.matrix()),
                &(s2.index.matrix() * k1s[p].matrix()),
            ) {
                return fail(format!("index square at point {p} does not commute"));
            }
            if !agree(s2.incl.codomain(), &(dn.matrix() * s1.incl.matrix()), &(s2.incl.matrix() * bd.matrix())) {
                return fail(format!("inclusion square at point {p} does not commute"));
            }
            if !agree(
                s2.quot.codomain(),
                &(k0s[p].matrix() * s1.quot.matrix()),
                &(s2.quot.matrix() * dn.matrix()),
            ) {
                return fail(format!("quotient square at point {p} does not commute"));
            }
        }
        for (i, &(p, q)) in inv1.c_pairs.iter().enumerate() {
            let pair = (self.rho[p], self.rho[q]);
            let Some(i2) = inv2.c_pairs.iter().position(|&c| c == pair) else {
                return fail(format!("pair ({p}, {q}) has no image pair"));
            };
            let (c1, c2) = (&inv1.c_maps[i], &inv2.c_maps[i2]);
            let dn = &k0o[at(inv1.down(p))];
            let bq = &k0o[at(inv1.boundary(q))];
            if !agree(c2.codomain(), &(bq.matrix() * c1.matrix()), &(c2.matrix() * dn.matrix())) {
                return fail(format!("square for pair ({p}, {q}) does not commute"));
            }
        }
        if let Some(t) = &self.total {
            hom(&inv1.total, &inv2.total, t, "κ0 on the whole graph")?;
            if let Some(i) = inv1.open_index(inv1.poset.all()) {
                if inv1.open_data[i].vertices.len() == inv1.vertices.len()
                    && !agree(&inv2.total, t, &self.k0_open[i])
                {
                    return fail("κ0 on the whole graph disagrees with κ0 on the top open".into());
                }
            }
        }
        Ok(())
    }

    /// `next ∘ self` for `self: inv1 → inv2`, `next: inv2 → inv3`.
    pub fn then(&self, next: &FKIso, inv1: &FKInvariant, inv2: &FKInvariant) -> Result<FKIso> {
        let mut k0_open = Vec::new();
        for i in 0..self.k0_open.len() {
            let j = self.target_open(inv1, inv2, i)?;
            k0_open.push(&next.k0_open[j] * &self.k0_open[i]);
        }
        let k0_simple = (0..self.rho.len()).map(|p| &next.k0_simple[self.rho[p]] * &self.k0_simple[p]).collect();
        let k1_simple = (0..self.rho.len()).map(|p| &next.k1_simple[self.rho[p]] * &self.k1_simple[p]).collect();
        let total = match (&self.total, &next.total) {
            (Some(a), Some(b)) => Some(b * a),
            _ => None,
        };
        Ok(FKIso { rho: self.rho.iter().map(|&p| next.rho[p]).collect(), k0_open, k0_simple, k1_simple, total })
    }

    /// Inverse of `self: inv1 → inv2`.
    pub fn inverse(&self, inv1: &FKInvariant, inv2: &FKInvariant) -> Result<FKIso> {
        let k = self.rho.len();
        let mut rho = vec![0; k];
        for (p, &q) in self.rho.iter().enumerate() {
            rho[q] = p;
        }
        let mut k0_open = vec![IntMatrix::zeros(0, 0); inv2.opens.len()];
        for i in 0..self.k0_open.len() {
            let j = self.target_open(inv1, inv2, i)?;
            k0_open[j] = hom(&inv1.open_data[i].k0, &inv2.open_data[j].k0, &self.k0_open[i], "κ0")?
                .inverse()?
                .matrix()
                .clone();
        }
        let mut k0_simple = vec![IntMatrix::zeros(0, 0); k];
        let mut k1_simple = vec![IntMatrix::zeros(0, 0); k];
        for p in 0..k {
            let q = self.rho[p];
            k0_simple[q] = hom(&inv1.simple[p].k0, &inv2.simple[q].k0, &self.k0_simple[p], "κ0")?
                .inverse()?
                .matrix()
                .clone();
            k1_simple[q] = hom(&inv1.simple[p].k1, &inv2.simple[q].k1, &self.k1_simple[p], "κ1")?
                .inverse()?
                .matrix()
                .clone();
        }
        let total = match &self.total {
            Some(t) => Some(hom(&inv1.total, &inv2.total, t, "κ0")?.inverse()?.matrix().clone()),
            None => None,
        };
        Ok(FKIso { rho, k0_open, k0_simple, k1_simple, total })
    }

    /// Equality as families of group maps (matrices may differ by relations).
    pub fn same_as(&self, other: &FKIso, inv1: &FKInvariant, inv2: &FKInvariant) -> bool {
        if self.rho != other.rho || self.k0_open.len() != other.k0_open.len() {
            return false;
        }
        let opens_ok = (0..self.k0_open.len()).all(|i| match self.target_open(inv1, inv2, i) {
            Ok(j) => agree(&inv2.open_data[j].k0, &self.k0_open[i], &other.k0_open[i]),
            Err(_) => false,
        });
        let simple_ok = (0..self.rho.len()).all(|p| {
            let q = self.rho[p];
            agree(&inv2.simple[q].k0, &self.k0_simple[p], &other.k0_simple[p])
                && self.k1_simple[p] == other.k1_simple[p]
        });
        let total_ok = match (&self.total, &other.total) {
            (Some(a), Some(b)) => agree(&inv2.total, a, b),
            _ => true,
        };
        opens_ok && simple_ok && total_ok
    }
}

pub fn verify_fk_iso(inv1: &FKInvariant, inv2: &FKInvariant, iso: &FKIso) -> bool {
    iso.check(inv1, inv2).is_ok()
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCertificate(msg.into())
}

/// Checks that `m` is `B ⊕ −I` with `B` on the first `b.rows()` coordinates.
fn check_padded(m: &BlockMatrix, b: &IntMatrix, what: &str) -> Result<()> {
    let n = b.rows();
    let total = m.matrix().rows();
    if m.row_comp() != m.col_comp() || total < n || m.matrix().cols() != total {
        return Err(invalid(format!("{what} is not a square padded B-matrix")));
    }
    for r in 0..total {
        for c in 0..total {
            let want = if r < n && c < n {
                b[(r, c)].clone()
            } else if r == c {
                Int::from(-1)
            } else {
                Int::zero()
            };
            if m.matrix()[(r, c)] != want {
                return Err(invalid(format!("{what} differs from the padded B-matrix at ({r}, {c})")));
            }
        }
    }
    Ok(())
}

/// The FK isomorphism induced by `e`, whose source is `−ι(−B)` for the graph
/// of `inv1` and whose target is `−ι(−B′)` for the graph of `inv2`, vertex
/// coordinates first. The target's labels give the component correspondence.
pub fn induced_iso(e: &Equivalence, inv1: &FKInvariant, inv2: &FKInvariant) -> Result<FKIso> {
    if let Some(why) = e.check(false) {
        return Err(invalid(format!("equivalence does not verify: {why}")));
    }
    let (n1, n2) = (inv1.vertices.len(), inv2.vertices.len());
    let cp1 = &inv1.condensation;
    let cp2 = &inv2.condensation;
    check_padded(&e.source, &inv1.b, "source")?;
    check_padded(&e.target, &inv2.b, "target")?;
    if e.source.poset() != cp1.poset() || e.source.row_comp()[..n1] != *cp1.vertex_components() {
        return Err(invalid("source labels are not the component layout of the first graph"));
    }
    let tl = e.target.row_comp();
    let mut sigma = vec![usize::MAX; cp2.len()];
    for v in 0..n2 {
        let c2 = cp2.component_of(v);
        if sigma[c2] == usize::MAX {
            sigma[c2] = tl[v];
        } else if sigma[c2] != tl[v] {
            return Err(invalid("target labels split a component of the second graph"));
        }
    }
    let mut seen = vec![false; cp1.len()];
    if sigma.len() != cp1.len() || sigma.iter().any(|&c| std::mem::replace(&mut seen[c], true)) {
        return Err(invalid("target labels do not match components one to one"));
    }
    if !cp2.poset().is_isomorphism(cp1.poset(), &sigma) {
        return Err(invalid("component correspondence is not order preserving"));
    }
    let rho: Vec<usize> = inv1
        .points
        .iter()
        .map(|&c1| {
            let c2 = sigma.iter().position(|&s| s == c1).expect("bijection");
            inv2.points.iter().position(|&x| x == c2).ok_or_else(|| invalid("a point maps to a trivial component"))
        })
        .collect::<Result<_>>()?;
    if rho.len() != inv2.len() {
        return Err(invalid("point counts differ"));
    }
    let sl = e.source.row_comp();
    let src_in = |f: CompSet, all: bool| -> Vec<usize> {
        (0..sl.len()).filter(|&i| (all || i < n1) && f.contains(sl[i])).collect()
    };
    let tgt_in = |f: CompSet, all: bool| -> Vec<usize> {
        (0..tl.len()).filter(|&i| (all || i < n2) && f.contains(tl[i])).collect()
    };
    let vt = e.v.matrix().transpose();
    let partial = FKIso { rho: rho.clone(), k0_open: vec![], k0_simple: vec![], k1_simple: vec![], total: None };
    let mut k0_open = Vec::new();
    for (i, &o) in inv1.opens.iter().enumerate() {
        let f = inv1.components_of_open(o);
        let rows = tgt_in(f, false);
        let j = partial.target_open(inv1, inv2, i)?;
        if rows != inv2.open_data[j].vertices {
            return Err(invalid(format!("open {i} does not correspond to an open of the second graph")));
        }
        k0_open.push(vt.submatrix(&rows, &src_in(f, false)));
    }
    let mut k0_simple = Vec::new();
    let mut k1_simple = Vec::new();
    for p in 0..inv1.len() {
        let f = inv1.components_of_point(p);
        let q = rho[p];
        let rows = tgt_in(f, false);
        if rows != inv2.simple[q].vertices {
            return Err(invalid(format!("point {p} does not correspond to point {q}")));
        }
        k0_simple.push(vt.submatrix(&rows, &src_in(f, false)));

        let (sa, ta) = (src_in(f, true), tgt_in(f, true));
        let uq = e.u.matrix().submatrix(&ta, &sa);
        let w = uq.inverse_unimodular().ok_or_else(|| invalid("U is not invertible on a subquotient"))?.transpose();
        let s1 = &inv1.simple[p];
        let s2 = &inv2.simple[q];
        let embed = IntMatrix::from_fn(sa.len(), s1.k1_basis.cols(), |r, c| {
            match s1.regular.iter().position(|&v| v == sa[r]) {
                Some(k) => s1.k1_basis[(k, c)].clone(),
                None => Int::zero(),
            }
        });
        let img = &w * &embed;
        let mut pick = Vec::new();
        for (r, &t) in ta.iter().enumerate() {
            if t < n2 && s2.regular.contains(&t) {
                pick.push(r);
            } else if !img.row(r).iter().all(Zero::is_zero) {
                return Err(invalid(format!("κ1 at point {p} leaves the kernel coordinates")));
            }
        }
        let img = img.select_rows(&pick);
        k1_simple.push(super::in_basis(&s2.k1_basis, &img));
    }
    let all1: Vec<usize> = (0..n1).collect();
    let all2: Vec<usize> = (0..n2).collect();
    let iso = FKIso { rho, k0_open, k0_simple, k1_simple, total: Some(vt.submatrix(&all2, &all1)) };
    iso.check(inv1, inv2).map_err(|e| invalid(format!("induced maps fail: {e}")))?;
    Ok(iso)
}

/// Whether a matrix-backed isomorphism sends the unit class to the unit class.
pub fn preserves_unit(iso: &FKIso, inv1: &FKInvariant, inv2: &FKInvariant) -> Result<bool> {
    let t = iso
        .total
        .as_ref()
        .ok_or_else(|| Error::Precondition("unit preservation needs a matrix-backed isomorphism".into()))?;
    if t.cols() != inv1.unit.len() || t.rows() != inv2.unit.len() {
        return Err(Error::Dimension("κ0 on the whole graph has the wrong shape".into()));
    }
    Ok(inv2.total.equal(&t.mul_vec(&inv1.unit), &inv2.unit))
}
