//! Reduced filtered K-theory of a graph: K-groups of gauge-invariant ideals
//! and their subquotients, the six-term sequences of nested pairs, the
//! reduced invariant over the primitive ideal space, and isomorphisms
//! between invariants.
//!
//! All groups use the `cok(B•ᵀ)` / `ker(B•ᵀ)` model on principal submatrices,
//! with generators indexed by vertices in graph order.

mod iso;
mod search;

use std::sync::Arc;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphcore::{
    condensation, is_hereditary, is_saturated, unit_class, CompSet, ComponentKind, ComponentPoset, Graph, Poset,
};
use crate::intlin::{ints_to_json, kernel_basis, FinAbPresentation, GroupHom, Int, IntMatrix, LinearSolver};

pub use iso::{induced_iso, preserves_unit, verify_fk_iso, FKIso};
pub use search::{compare_necessary, find_fk_iso, poset_isomorphisms, Comparison, SearchOutcome};

/// K-theory of the subquotient carried by a vertex set `S = H ∖ H₀`.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub vertices: Vec<usize>,
    /// Regular vertices of `S`: the coordinates of the kernel.
    pub regular: Vec<usize>,
    pub k0: Arc<FinAbPresentation>,
    pub k1: Arc<FinAbPresentation>,
    /// Columns form a basis of `ker(B⟨S⟩•ᵀ)` in `regular` coordinates.
    pub k1_basis: IntMatrix,
}

impl Subquotient {
    fn new(g: &Graph, b: &IntMatrix, vertices: Vec<usize>) -> Self {
        let regular: Vec<usize> = vertices.iter().copied().filter(|&v| g.is_regular(v)).collect();
        let bt = b.submatrix(&regular, &vertices).transpose();
        let names = vertices.iter().map(|&v| g.vertex(v).to_string()).collect();
        let k0 = FinAbPresentation::new(names, bt.clone()).expect("one label per vertex");
        let k1_basis = kernel_basis(&bt);
        let k1 = FinAbPresentation::free((0..k1_basis.cols()).map(|i| format!("k{i}")).collect());
        Subquotient { vertices, regular, k0: Arc::new(k0), k1: Arc::new(k1), k1_basis }
    }
}

fn positions(sub: &[usize], within: &[usize]) -> Vec<usize> {
    sub.iter().map(|v| within.iter().position(|w| w == v).expect("subset")).collect()
}

/// Matrix of extension by zero from `sub` coordinates to `within` coordinates.
fn extension(sub: &[usize], within: &[usize]) -> IntMatrix {
    let pos = positions(sub, within);
    IntMatrix::from_fn(within.len(), sub.len(), |r, c| if pos[c] == r { Int::from(1) } else { Int::zero() })
}

/// Expresses each column of `vectors` in the basis given by the columns of `basis`.
fn in_basis(basis: &IntMatrix, vectors: &IntMatrix) -> IntMatrix {
    let solver = LinearSolver::new(basis);
    let cols: Vec<Vec<Int>> = (0..vectors.cols())
        .map(|j| {
            solver
                .particular(&vectors.col(j))
                .expect("dimensions agree")
                .expect("vector lies in the saturated kernel lattice")
        })
        .collect();
    IntMatrix::from_columns(basis.cols(), &cols)
}

/// The cyclic six-term sequence of `I(H₀) ↪ I(H) ↠ I(H)/I(H₀)`.
#[derive(Clone, Debug)]
pub struct SixTerm {
    pub ideal: Subquotient,
    pub whole: Subquotient,
    pub quotient: Subquotient,
    pub incl: GroupHom,
    pub quot: GroupHom,
    /// `K0(quotient) → K1(ideal)`, always zero.
    pub exp: GroupHom,
    pub k1_incl: GroupHom,
    pub k1_quot: GroupHom,
    pub index: GroupHom,
}

impl SixTerm {
    fn from_parts(b: &IntMatrix, ideal: Subquotient, whole: Subquotient, quotient: Subquotient) -> Self {
        let incl = GroupHom::new(ideal.k0.clone(), whole.k0.clone(), extension(&ideal.vertices, &whole.vertices))
            .expect("inclusion is well defined");
        let quot = GroupHom::new(
            whole.k0.clone(),
            quotient.k0.clone(),
            extension(&quotient.vertices, &whole.vertices).transpose(),
        )
        .expect("restriction is well defined");
        let exp = GroupHom::zero(quotient.k0.clone(), ideal.k1.clone());
        let up = &extension(&ideal.regular, &whole.regular) * &ideal.k1_basis;
        let k1_incl = GroupHom::new(ideal.k1.clone(), whole.k1.clone(), in_basis(&whole.k1_basis, &up))
            .expect("free groups");
        let down = &extension(&quotient.regular, &whole.regular).transpose() * &whole.k1_basis;
        let k1_quot = GroupHom::new(whole.k1.clone(), quotient.k1.clone(), in_basis(&quotient.k1_basis, &down))
            .expect("free groups");
        let c = b.submatrix(&quotient.regular, &ideal.vertices);
        let index = GroupHom::new(quotient.k1.clone(), ideal.k0.clone(), &c.transpose() * &quotient.k1_basis)
            .expect("index map lands in K0 of the ideal");
        SixTerm { ideal, whole, quotient, incl, quot, exp, k1_incl, k1_quot, index }
    }

    /// Exactness at each of the six nodes, starting at `K0(ideal)`.
    pub fn exactness(&self) -> [bool; 6] {
        use crate::intlin::is_exact_at;
        [
            is_exact_at(&self.index, &self.incl),
            is_exact_at(&self.incl, &self.quot),
            is_exact_at(&self.quot, &self.exp),
            is_exact_at(&self.exp, &self.k1_incl),
            is_exact_at(&self.k1_incl, &self.k1_quot),
            is_exact_at(&self.k1_quot, &self.index),
        ]
    }

    pub fn is_exact(&self) -> bool {
        self.exactness().iter().all(|&x| x)
    }
}

fn check_hs(g: &Graph, h: &[usize], what: &str) -> Result<()> {
    if let Some(&v) = h.iter().find(|&&v| v >= g.len()) {
        return Err(Error::Precondition(format!("{what} contains vertex index {v} outside the graph")));
    }
    if !is_hereditary(g, h) {
        return Err(Error::Precondition(format!("{what} is not hereditary")));
    }
    if !is_saturated(g, h) {
        return Err(Error::Precondition(format!("{what} is not saturated")));
    }
    Ok(())
}

fn sorted_set(h: &[usize]) -> Vec<usize> {
    let mut v = h.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// K0 and a K1 basis of the subquotient `H ∖ H₀`.
pub fn subquotient_k(g: &Graph, h: &[usize], h0: &[usize]) -> Result<Subquotient> {
    let h = sorted_set(h);
    let h0 = sorted_set(h0);
    check_hs(g, &h, "H")?;
    check_hs(g, &h0, "H0")?;
    if !h0.iter().all(|v| h.binary_search(v).is_ok()) {
        return Err(Error::Precondition("H0 is not contained in H".into()));
    }
    let s: Vec<usize> = h.iter().copied().filter(|v| h0.binary_search(v).is_err()).collect();
    Ok(Subquotient::new(g, &g.b_matrix(), s))
}

pub fn six_term(g: &Graph, h: &[usize], h0: &[usize]) -> Result<SixTerm> {
    let quotient = subquotient_k(g, h, h0)?;
    let b = g.b_matrix();
    let ideal = Subquotient::new(g, &b, sorted_set(h0));
    let whole = Subquotient::new(g, &b, sorted_set(h));
    Ok(SixTerm::from_parts(&b, ideal, whole, quotient))
}

/// The three maps `K1(p) → K0(∂p) → K0(↓p) → K0(p)` for one point `p`.
#[derive(Clone, Debug)]
pub struct PointSequence {
    pub index: GroupHom,
    pub incl: GroupHom,
    pub quot: GroupHom,
}

/// Reduced filtered K-theory. Points are the nontrivial components, indexed
/// in the order they appear in the condensation (a linear extension).
#[derive(Clone, Debug)]
pub struct FKInvariant {
    vertices: Vec<String>,
    b: IntMatrix,
    condensation: ComponentPoset,
    points: Vec<usize>,
    poset: Poset,
    /// For each condensation component, the points below it.
    reach: Vec<CompSet>,
    opens: Vec<CompSet>,
    open_data: Vec<Subquotient>,
    simple: Vec<Subquotient>,
    seq: Vec<PointSequence>,
    c_pairs: Vec<(usize, usize)>,
    c_maps: Vec<GroupHom>,
    total: Arc<FinAbPresentation>,
    unit: Vec<Int>,
}

impl FKInvariant {
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn b_matrix(&self) -> &IntMatrix {
        &self.b
    }

    pub fn condensation(&self) -> &ComponentPoset {
        &self.condensation
    }

    /// Condensation component of each point.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Open sets `↓p` and `↓p ∖ {p}`, deduplicated, smallest first.
    pub fn opens(&self) -> &[CompSet] {
        &self.opens
    }

    pub fn open_index(&self, s: CompSet) -> Option<usize> {
        self.opens.iter().position(|&o| o == s)
    }

    pub fn down(&self, p: usize) -> CompSet {
        self.poset.down(p)
    }

    pub fn boundary(&self, p: usize) -> CompSet {
        self.poset.down(p).without(p)
    }

    pub fn open(&self, i: usize) -> &Subquotient {
        &self.open_data[i]
    }

    pub fn k0_open(&self, s: CompSet) -> Option<&Arc<FinAbPresentation>> {
        self.open_index(s).map(|i| &self.open_data[i].k0)
    }

    pub fn simple(&self, p: usize) -> &Subquotient {
        &self.simple[p]
    }

    pub fn sequence(&self, p: usize) -> &PointSequence {
        &self.seq[p]
    }

    pub fn c_pairs(&self) -> &[(usize, usize)] {
        &self.c_pairs
    }

    pub fn c_map(&self, i: usize) -> &GroupHom {
        &self.c_maps[i]
    }

    pub fn total(&self) -> &Arc<FinAbPresentation> {
        &self.total
    }

    pub fn unit(&self) -> &[Int] {
        &self.unit
    }

    /// Condensation components whose vertices form the ideal of the open set `s`.
    pub fn components_of_open(&self, s: CompSet) -> CompSet {
        let mut out = CompSet::empty();
        for (c, r) in self.reach.iter().enumerate() {
            if r.is_subset(s) {
                out.insert(c);
            }
        }
        out
    }

    /// Condensation components of the gauge-simple subquotient at `p`.
    pub fn components_of_point(&self, p: usize) -> CompSet {
        let hi = self.components_of_open(self.down(p));
        let lo = self.components_of_open(self.boundary(p));
        CompSet(hi.0 & !lo.0)
    }

    pub fn to_json(&self) -> Value {
        let names = |vs: &[usize]| -> Vec<&str> { vs.iter().map(|&v| self.vertices[v].as_str()).collect() };
        let group = |g: &FinAbPresentation| json!({"invariant_factors": ints_to_json(g.invariant_factors())});
        let cp = &self.condensation;
        json!({
            "vertices": self.vertices,
            "points": self.points.iter().map(|&c| names(&cp.components()[c])).collect::<Vec<_>>(),
            "order": self.poset.strict_pairs().into_iter().map(|(i, j)| [i, j]).collect::<Vec<_>>(),
            "opens": self.opens.iter().zip(&self.open_data).map(|(o, d)| json!({
                "points": o.iter().collect::<Vec<_>>(),
                "vertices": names(&d.vertices),
                "k0": group(&d.k0),
                "relations": d.k0.relations(),
            })).collect::<Vec<_>>(),
            "simple": self.simple.iter().enumerate().map(|(p, s)| json!({
                "point": p,
                "vertices": names(&s.vertices),
                "k0": group(&s.k0),
                "k1_rank": s.k1_basis.cols(),
                "k1_basis": s.k1_basis,
            })).collect::<Vec<_>>(),
            "sequences": self.seq.iter().enumerate().map(|(p, s)| json!({
                "point": p,
                "index": s.index.matrix(),
                "incl": s.incl.matrix(),
                "quot": s.quot.matrix(),
            })).collect::<Vec<_>>(),
            "c_maps": self.c_pairs.iter().zip(&self.c_maps).map(|(&(p, q), m)| json!({
                "p": p, "q": q, "map": m.matrix(),
            })).collect::<Vec<_>>(),
            "total": group(&self.total),
            "unit": {
                "coordinates": ints_to_json(&self.unit),
                "snf_coordinates": ints_to_json(&self.total.snf_coordinates(&self.unit)),
            },
        })
    }
}

/// Checks the hypotheses of the invariant: nonempty, no sinks or sources, Condition (K).
pub fn check_invariant_preconditions(g: &Graph) -> Result<ComponentPoset> {
    if g.is_empty() {
        return Err(Error::Precondition("graph has no vertices".into()));
    }
    if let Some(&v) = g.sinks().first() {
        return Err(Error::Precondition(format!("vertex `{}` is a sink", g.vertex(v))));
    }
    if let Some(&v) = g.sources().first() {
        return Err(Error::Precondition(format!("vertex `{}` is a source", g.vertex(v))));
    }
    let cp = condensation(g);
    if let Some(c) = cp.kinds().iter().position(|k| *k == ComponentKind::Cyclic) {
        let members: Vec<&str> = cp.components()[c].iter().map(|&v| g.vertex(v)).collect();
        return Err(Error::Precondition(format!(
            "component {{{}}} is a single cycle (Condition (K) fails)",
            members.join(", ")
        )));
    }
    if cp.len() > CompSet::MAX {
        return Err(Error::Precondition(format!("more than {} components", CompSet::MAX)));
    }
    Ok(cp)
}

pub fn fk_invariant(g: &Graph) -> Result<FKInvariant> {
    let cp = check_invariant_preconditions(g)?;
    let b = g.b_matrix();
    let points: Vec<usize> = (0..cp.len()).filter(|&c| cp.kinds()[c] == ComponentKind::Proper).collect();
    let k = points.len();
    let full = cp.poset();
    let poset = Poset::from_relation(
        points.iter().map(|&x| points.iter().map(|&y| full.leq(x, y)).collect()).collect(),
    );
    let reach: Vec<CompSet> = (0..cp.len())
        .map(|c| {
            let mut s = CompSet::empty();
            for (p, &x) in points.iter().enumerate() {
                if full.leq(x, c) {
                    s.insert(p);
                }
            }
            s
        })
        .collect();
    let comps_of = |s: CompSet| {
        let mut out = CompSet::empty();
        for (c, r) in reach.iter().enumerate() {
            if r.is_subset(s) {
                out.insert(c);
            }
        }
        out
    };
    let mut opens: Vec<CompSet> = (0..k).flat_map(|p| [poset.down(p), poset.down(p).without(p)]).collect();
    opens.sort_by_key(|s| (s.len(), s.0));
    opens.dedup();
    let open_data: Vec<Subquotient> =
        opens.iter().map(|&o| Subquotient::new(g, &b, cp.vertices_of(comps_of(o)))).collect();
    let at = |s: CompSet| opens.iter().position(|&o| o == s).expect("open set listed");
    let mut simple = Vec::with_capacity(k);
    let mut seq = Vec::with_capacity(k);
    for p in 0..k {
        let hi = comps_of(poset.down(p));
        let lo = comps_of(poset.down(p).without(p));
        let sq = Subquotient::new(g, &b, cp.vertices_of(CompSet(hi.0 & !lo.0)));
        let whole = &open_data[at(poset.down(p))];
        let ideal = &open_data[at(poset.down(p).without(p))];
        let st = SixTerm::from_parts(&b, ideal.clone(), whole.clone(), sq.clone());
        seq.push(PointSequence { index: st.index, incl: st.incl, quot: st.quot });
        simple.push(sq);
    }
    let mut c_pairs = Vec::new();
    let mut c_maps = Vec::new();
    for q in 0..k {
        let dq = poset.down(q).without(q);
        for p in 0..k {
            let dp = poset.down(p);
            let proper = dp.is_subset(dq) && dp != dq;
            let tight = !(0..k).any(|r| {
                let dr = poset.down(r);
                dp.is_subset(dr) && dp != dr && dr.is_subset(dq)
            });
            if proper && tight {
                let from = &open_data[at(dp)];
                let to = &open_data[at(dq)];
                c_pairs.push((p, q));
                c_maps.push(
                    GroupHom::new(from.k0.clone(), to.k0.clone(), extension(&from.vertices, &to.vertices))
                        .expect("inclusion of ideals"),
                );
            }
        }
    }
    let unit = unit_class(g);
    Ok(FKInvariant {
        vertices: g.vertices().to_vec(),
        b,
        condensation: cp,
        points,
        poset,
        reach,
        opens,
        open_data,
        simple,
        seq,
        c_pairs,
        c_maps,
        total: unit.group,
        unit: unit.coordinates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcore::hereditary_saturated_sets;
    use crate::intlin::int;

    fn ab() -> Graph {
        Graph::from_edges(&["a", "b"], &[("a", "a", 3), ("b", "b", 3), ("b", "a", 1)]).unwrap()
    }

    #[test]
    fn subquotient_examples() {
        let o3 = Graph::bouquet(3);
        let s = subquotient_k(&o3, &[0], &[]).unwrap();
        assert_eq!(s.k0.invariant_factors(), &[int(2)]);
        assert_eq!(s.k1_basis.cols(), 0);
        let g = ab();
        let s = subquotient_k(&g, &[0, 1], &[0]).unwrap();
        assert_eq!(s.k0.invariant_factors(), &[int(2)]);
        assert_eq!(s.k1_basis.cols(), 0);
        let s = subquotient_k(&g, &[0], &[]).unwrap();
        assert_eq!(s.k0.invariant_factors(), &[int(2)]);
        assert!(subquotient_k(&g, &[1], &[]).is_err());
    }

    #[test]
    fn six_term_examples() {
        let g = ab();
        let st = six_term(&g, &[0, 1], &[0]).unwrap();
        assert!(st.is_exact());
        assert_eq!(st.whole.k0.invariant_factors(), &[int(4)]);
        let x = st.incl.apply(&[int(1)]);
        let snf = st.whole.k0.snf_coordinates(&x);
        assert_eq!(snf.len(), 1);
        assert_eq!(num_integer::Integer::mod_floor(&snf[0], &int(4)) % 2, int(0));
        assert!(!st.whole.k0.is_zero(&x));

        let g = Graph::from_edges(&["a", "b"], &[("a", "a", 3), ("b", "b", 1), ("b", "a", 1)]).unwrap();
        let st = six_term(&g, &[0, 1], &[0]).unwrap();
        assert!(st.is_exact());
        assert_eq!(st.quotient.k1_basis.cols(), 1);
        let img = st.index.apply(&[int(1)]);
        assert!(!st.ideal.k0.is_zero(&img));

        let st = six_term(&ab(), &[0, 1], &[]).unwrap();
        assert!(st.is_exact());
        assert!(st.index.is_zero_map());
    }

    #[test]
    fn exact_on_all_pairs() {
        let g = Graph::from_edges(
            &["a", "b", "c", "t"],
            &[("a", "a", 2), ("b", "b", 2), ("c", "c", 3), ("c", "a", 1), ("c", "b", 2), ("t", "c", 1), ("t", "a", 1)],
        )
        .unwrap();
        let hs = hereditary_saturated_sets(&g);
        for h in &hs {
            for h0 in &hs {
                if h0.iter().all(|v| h.contains(v)) {
                    assert!(six_term(&g, h, h0).unwrap().is_exact(), "{h:?} {h0:?}");
                }
            }
        }
    }

    #[test]
    fn invariant_shapes() {
        let inv = fk_invariant(&Graph::bouquet(3)).unwrap();
        assert_eq!(inv.len(), 1);
        assert!(inv.c_pairs().is_empty());
        let inv = fk_invariant(&ab()).unwrap();
        assert_eq!(inv.len(), 2);
        assert!(inv.c_pairs().is_empty());
        let v = Graph::from_edges(
            &["p1", "p2", "q"],
            &[("p1", "p1", 2), ("p2", "p2", 2), ("q", "q", 2), ("q", "p1", 1), ("q", "p2", 1)],
        )
        .unwrap();
        let inv = fk_invariant(&v).unwrap();
        assert_eq!(inv.c_pairs(), &[(0, 2), (1, 2)]);
        assert!(fk_invariant(&Graph::bouquet(1)).is_err());
    }

    #[test]
    fn transition_vertex_absorbed() {
        let g = Graph::from_edges(
            &["a", "t", "b"],
            &[("a", "a", 2), ("b", "b", 2), ("b", "t", 1), ("t", "a", 1)],
        )
        .unwrap();
        let inv = fk_invariant(&g).unwrap();
        assert_eq!(inv.len(), 2);
        assert_eq!(inv.simple(0).vertices, vec![0, 1]);
        assert_eq!(inv.simple(1).vertices, vec![2]);
    }
}
