//! Certified graph moves.
//!
//! Every move works on a sink-free graph and returns the new graph together
//! with a [`MoveCertificate`]: a pair `(U, V)` with `U·(−ι(−B_source))·V =
//! B_target`, checked before it is returned.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::fk::{fk_invariant, induced_iso, FKIso};
use crate::graphcore::{condensation, ComponentKind, Graph};
use crate::intlin::{int, smith_normal_form, Int, IntMatrix};
use crate::posetblock::{BlockMatrix, Equivalence, MultiIndex};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    RowAdd,
    ColAdd,
    EdgeExpand,
    CuntzSplice,
    CuntzSpliceTwice,
    EnlargeBlock,
    ElementaryChain,
    /// Reordering of the vertex list.
    Relabel,
    /// New vertex names, same matrix.
    Rename,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MoveParams {
    Pair { u: String, v: String },
    Edge { source: String, range: String },
    Vertex { u: String },
    Enlarge { component: usize, steps: Vec<ChainStep> },
    Chain { steps: Vec<ChainStep> },
    Order { order: Vec<String> },
    Names { names: Vec<String> },
}

/// One link of a chain; `inverse` runs the certificate backwards (padding-free steps only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub certificate: MoveCertificate,
    #[serde(default)]
    pub inverse: bool,
}

impl ChainStep {
    pub fn forward(certificate: MoveCertificate) -> Self {
        ChainStep { certificate, inverse: false }
    }

    pub fn backward(certificate: MoveCertificate) -> Self {
        ChainStep { certificate, inverse: true }
    }

    pub fn source(&self) -> &Graph {
        if self.inverse {
            &self.certificate.target
        } else {
            &self.certificate.source
        }
    }

    pub fn target(&self) -> &Graph {
        if self.inverse {
            &self.certificate.source
        } else {
            &self.certificate.target
        }
    }
}

/// `target_components[v]` is the component of `source` (in its condensation
/// order) that target vertex `v` belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCertificate {
    pub kind: MoveKind,
    pub params: MoveParams,
    pub padding: MultiIndex,
    #[serde(rename = "U")]
    pub u: IntMatrix,
    #[serde(rename = "V")]
    pub v: IntMatrix,
    pub source: Graph,
    pub target: Graph,
    pub unital: bool,
    pub target_components: Vec<usize>,
}

impl MoveCertificate {
    /// `−ι_padding(−B_source)` over the condensation of the source.
    pub fn source_block(&self) -> Result<BlockMatrix> {
        Ok(BlockMatrix::from_graph(&self.source)?.neg_iota(&self.padding))
    }

    pub fn target_block(&self) -> Result<BlockMatrix> {
        let cp = condensation(&self.source);
        BlockMatrix::square(cp.poset().clone(), self.target_components.clone(), self.target.b_matrix())
    }

    pub fn equivalence(&self) -> Result<Equivalence> {
        let source = self.source_block()?;
        let target = self.target_block()?;
        let poset = source.poset().clone();
        let u = BlockMatrix::new(poset.clone(), target.row_comp().to_vec(), source.row_comp().to_vec(), self.u.clone())?;
        let v = BlockMatrix::new(poset, source.col_comp().to_vec(), target.col_comp().to_vec(), self.v.clone())?;
        Ok(Equivalence { u, v, source, target })
    }

    /// Whether the certificate is expected to lie in SL_P.
    pub fn requires_sl(&self) -> bool {
        match (&self.kind, &self.params) {
            (MoveKind::CuntzSplice | MoveKind::Relabel, _) => false,
            (_, MoveParams::Chain { steps } | MoveParams::Enlarge { steps, .. }) => {
                steps.iter().all(|s| s.certificate.requires_sl())
            }
            _ => true,
        }
    }

    /// The induced FK isomorphism, when both graphs have a defined invariant.
    pub fn induced_iso(&self) -> Result<Option<FKIso>> {
        let (Ok(inv1), Ok(inv2)) = (fk_invariant(&self.source), fk_invariant(&self.target)) else {
            return Ok(None);
        };
        induced_iso(&self.equivalence()?, &inv1, &inv2).map(Some)
    }
}

fn illegal(msg: impl Into<String>) -> Error {
    Error::IllegalMove(msg.into())
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidCertificate(msg.into())
}

fn sink_free(g: &Graph) -> Result<()> {
    match g.sinks().first() {
        Some(&s) => Err(Error::Precondition(format!("moves need a sink-free graph; `{}` is a sink", g.vertex(s)))),
        None => Ok(()),
    }
}

/// Identity plus `k` at `(r, c)`.
fn elementary(n: usize, r: usize, c: usize, k: i64) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    m[(r, c)] += int(k);
    m
}

/// Checks that the intended labels describe the condensation of `target` and
/// that it is identified with the condensation of `source`.
fn target_labels(source: &Graph, target: &Graph, intended: Vec<usize>) -> Result<Vec<usize>> {
    let cs = condensation(source);
    let ct = condensation(target);
    if ct.len() != cs.len() {
        return Err(illegal(format!("move changes the number of components from {} to {}", cs.len(), ct.len())));
    }
    let mut sigma = vec![usize::MAX; ct.len()];
    for (v, &l) in intended.iter().enumerate() {
        let c = ct.component_of(v);
        if sigma[c] == usize::MAX {
            sigma[c] = l;
        } else if sigma[c] != l {
            return Err(illegal("move merges components"));
        }
    }
    let mut seen = vec![false; cs.len()];
    for &s in &sigma {
        if s >= cs.len() || std::mem::replace(&mut seen[s], true) {
            return Err(illegal("move splits or merges components"));
        }
    }
    if !ct.poset().is_isomorphism(cs.poset(), &sigma) {
        return Err(illegal("move changes the component order"));
    }
    if (0..ct.len()).any(|c| ct.kinds()[c] != cs.kinds()[sigma[c]]) {
        return Err(illegal("move changes the kind of a component"));
    }
    Ok(intended)
}

struct Draft {
    kind: MoveKind,
    params: MoveParams,
    padding: MultiIndex,
    u: IntMatrix,
    v: IntMatrix,
    target: Graph,
    labels: Vec<usize>,
    unital: bool,
}

fn certify(source: &Graph, d: Draft, with_fk: bool) -> Result<MoveCertificate> {
    let labels = target_labels(source, &d.target, d.labels)?;
    let c = MoveCertificate {
        kind: d.kind,
        params: d.params,
        padding: d.padding,
        u: d.u,
        v: d.v,
        source: source.clone(),
        target: d.target,
        unital: d.unital,
        target_components: labels,
    };
    let e = c.equivalence()?;
    if let Some(why) = e.check(c.requires_sl()) {
        return Err(invalid(format!("{:?} certificate: {why}", c.kind)));
    }
    if with_fk {
        c.induced_iso()?;
    }
    Ok(c)
}

fn add_move(g: &Graph, u: &str, v: &str, row: bool, with_fk: bool) -> Result<(Graph, MoveCertificate)> {
    sink_free(g)?;
    let (iu, iv) = (g.index_of(u)?, g.index_of(v)?);
    if iu == iv {
        return Err(illegal("addition needs two distinct vertices"));
    }
    if g.edges(iu, iv).is_zero() {
        return Err(illegal(format!("no edge from `{u}` to `{v}`")));
    }
    if row && !g.is_regular(iv) {
        return Err(illegal(format!("`{v}` is not regular")));
    }
    if !row && g.out_degree(iu) < int(2) {
        return Err(illegal(format!("`{u}` emits fewer than two edges")));
    }
    let n = g.len();
    let w = elementary(n, iu, iv, 1);
    let b = g.b_matrix();
    let bf = if row { &w * &b } else { &b * &w };
    let target = Graph::from_b_matrix(g.vertices().to_vec(), &bf)
        .map_err(|e| illegal(format!("addition yields an invalid graph: {e}")))?;
    let cp = condensation(g);
    let (uu, vv) = if row { (w, IntMatrix::identity(n)) } else { (IntMatrix::identity(n), w) };
    let d = Draft {
        kind: if row { MoveKind::RowAdd } else { MoveKind::ColAdd },
        params: MoveParams::Pair { u: u.into(), v: v.into() },
        padding: MultiIndex::zero(cp.len()),
        u: uu,
        v: vv,
        target: target.clone(),
        labels: cp.vertex_components().to_vec(),
        unital: row,
    };
    Ok((target, certify(g, d, with_fk)?))
}

/// Adds row `v` of `B` to row `u`.
pub fn row_add(g: &Graph, u: &str, v: &str) -> Result<(Graph, MoveCertificate)> {
    add_move(g, u, v, true, true)
}

/// Row or column addition whose induced FK map is left to an enclosing chain.
pub(crate) fn addition_step(g: &Graph, u: &str, v: &str, row: bool) -> Result<(Graph, MoveCertificate)> {
    add_move(g, u, v, row, false)
}

/// Adds column `u` of `B` to column `v`.
pub fn col_add(g: &Graph, u: &str, v: &str) -> Result<(Graph, MoveCertificate)> {
    add_move(g, u, v, false, true)
}

fn expand_move(g: &Graph, s: &str, r: &str, with_fk: bool) -> Result<(Graph, MoveCertificate)> {
    sink_free(g)?;
    let (is, ir) = (g.index_of(s)?, g.index_of(r)?);
    if g.edges(is, ir).is_zero() {
        return Err(illegal(format!("no edge from `{s}` to `{r}`")));
    }
    let cp = condensation(g);
    let j = cp.component_of(is);
    if cp.component_of(ir) != j {
        return Err(illegal(format!("edge `{s}`→`{r}` does not lie on a cycle")));
    }
    let n = g.len();
    let name = g.fresh_name(&format!("{s}~{r}"));
    let mut a = g.adjacency().direct_sum(&IntMatrix::zeros(1, 1));
    a[(is, ir)] -= Int::one();
    a[(is, n)] = Int::one();
    a[(n, ir)] = Int::one();
    let mut vertices = g.vertices().to_vec();
    vertices.push(name);
    let target = Graph::new(vertices, a)?;
    let mut labels = cp.vertex_components().to_vec();
    labels.push(j);
    let d = Draft {
        kind: MoveKind::EdgeExpand,
        params: MoveParams::Edge { source: s.into(), range: r.into() },
        padding: MultiIndex::unit(cp.len(), j, 1),
        u: elementary(n + 1, is, n, -1),
        v: elementary(n + 1, n, ir, -1),
        target: target.clone(),
        labels,
        unital: false,
    };
    Ok((target, certify(g, d, with_fk)?))
}

/// Replaces one edge `s → r` (which must lie on a cycle) by a path of length two
/// through a new vertex appended at the end.
pub fn edge_expand(g: &Graph, s: &str, r: &str) -> Result<(Graph, MoveCertificate)> {
    expand_move(g, s, r, true)
}

fn gadget_names(g: &Graph, u: &str, suffixes: &[&str]) -> Vec<String> {
    let mut taken = g.clone();
    let mut names = Vec::new();
    for s in suffixes {
        let name = taken.fresh_name(&format!("{u}#{s}"));
        let mut vs = taken.vertices().to_vec();
        vs.push(name.clone());
        taken = Graph::new(vs, taken.adjacency().direct_sum(&IntMatrix::zeros(1, 1))).expect("fresh name");
        names.push(name);
    }
    names
}

/// Appends a gadget whose `B` block (including the coupling to `u` through the
/// first gadget vertex) is given row by row, with `u` as column 0.
fn attach(g: &Graph, u: &str, suffixes: &[&str], rows: &[&[i64]]) -> Result<Graph> {
    let iu = g.index_of(u)?;
    let n = g.len();
    let k = suffixes.len();
    let mut b = g.b_matrix().direct_sum(&IntMatrix::zeros(k, k));
    b[(iu, n)] = Int::one();
    for (i, row) in rows.iter().enumerate() {
        b[(n + i, iu)] = int(row[0]);
        for (t, &x) in row[1..].iter().enumerate() {
            b[(n + i, n + t)] = int(x);
        }
    }
    let mut vertices = g.vertices().to_vec();
    vertices.extend(gadget_names(g, u, suffixes));
    Graph::from_b_matrix(vertices, &b)
}

/// The graph with the two-vertex splice gadget attached at `u` (no certificate).
pub fn splice_graph(g: &Graph, u: &str) -> Result<Graph> {
    attach(g, u, &["v1", "v2"], &[&[1, 0, 1], &[0, 1, 0]])
}

/// The graph with the four-vertex double-splice gadget attached at `u` (no certificate).
pub fn splice_twice_graph(g: &Graph, u: &str) -> Result<Graph> {
    attach(g, u, &["w1", "w2", "w3", "w4"], &[&[1, 0, 1, 1, 0], &[0, 1, 0, 0, 0], &[0, 1, 0, 0, 1], &[0, 0, 0, 1, 0]])
}

fn standard_form(g: &Graph) -> Result<()> {
    sink_free(g)?;
    let b = BlockMatrix::from_graph(g)?;
    match b.mp_plus_failure() {
        Some(why) => Err(Error::Precondition(format!("certified splices need standard form: {why}"))),
        None => Ok(()),
    }
}

fn splice_twice_move(g: &Graph, u: &str, with_fk: bool) -> Result<(Graph, MoveCertificate)> {
    standard_form(g)?;
    let iu = g.index_of(u)?;
    let n = g.len();
    let cp = condensation(g);
    let j = cp.component_of(iu);
    let target = splice_twice_graph(g, u)?;
    let mut uu = IntMatrix::identity(n + 4);
    uu[(iu, n + 1)] = Int::one();
    uu[(n, n + 3)] = Int::one();
    let mut vv = IntMatrix::identity(n + 4);
    vv[(n, iu)] = int(-1);
    let corner = [[0, -1, 0, 0], [-1, 0, 0, 0], [-1, 0, 0, -1], [0, 0, -1, 0]];
    for (r, row) in corner.iter().enumerate() {
        for (c, &x) in row.iter().enumerate() {
            vv[(n + r, n + c)] = int(x);
        }
    }
    let mut labels = cp.vertex_components().to_vec();
    labels.extend([j; 4]);
    let d = Draft {
        kind: MoveKind::CuntzSpliceTwice,
        params: MoveParams::Vertex { u: u.into() },
        padding: MultiIndex::unit(cp.len(), j, 4),
        u: uu,
        v: vv,
        target: target.clone(),
        labels,
        unital: false,
    };
    Ok((target, certify(g, d, with_fk)?))
}

/// Attaches the double-splice gadget at `u`; requires `B_g ∈ M_P^+`.
pub fn cuntz_splice_twice(g: &Graph, u: &str) -> Result<(Graph, MoveCertificate)> {
    splice_twice_move(g, u, true)
}

/// The equivalence from `B_{E*} ⊕ −I₂` to `B_{E**}`, where `E*` and `E**` are the
/// single and double splices of `g` at `u`; coordinates are the vertices of
/// `g`, then the gadget vertices, then the padding.
pub fn splice_conversion(g: &Graph, u: &str) -> Result<Equivalence> {
    sink_free(g)?;
    let iu = g.index_of(u)?;
    let n = g.len();
    let cp = condensation(g);
    let j = cp.component_of(iu);
    let poset = cp.poset().clone();
    let mut labels = cp.vertex_components().to_vec();
    labels.extend([j; 4]);
    let once = splice_graph(g, u)?.b_matrix().direct_sum(&IntMatrix::diagonal(&[int(-1), int(-1)]));
    let twice = splice_twice_graph(g, u)?.b_matrix();
    let mut uu = IntMatrix::identity(n + 4);
    uu[(n, n + 3)] = Int::one();
    let mut vv = IntMatrix::identity(n + 4);
    vv[(n + 2, n)] = int(-1);
    vv[(n + 2, n + 2)] = Int::zero();
    vv[(n + 2, n + 3)] = int(-1);
    vv[(n + 3, n + 2)] = int(-1);
    vv[(n + 3, n + 3)] = Int::zero();
    let sq = |m: IntMatrix| BlockMatrix::square(poset.clone(), labels.clone(), m);
    let e = Equivalence { u: sq(uu)?, v: sq(vv)?, source: sq(once)?, target: sq(twice)? };
    if let Some(why) = e.check(false) {
        return Err(invalid(format!("splice conversion: {why}")));
    }
    Ok(e)
}

/// Whether rows and columns `k..` of `m` are those of an identity matrix.
fn identity_tail(m: &IntMatrix, k: usize) -> bool {
    (0..m.rows()).all(|r| {
        (0..m.cols()).all(|c| {
            if r < k && c < k {
                return true;
            }
            let want = if r == c { Int::one() } else { Int::zero() };
            m[(r, c)] == want
        })
    })
}

fn splice_move(g: &Graph, u: &str, with_fk: bool) -> Result<(Graph, MoveCertificate)> {
    let (_, twice) = splice_twice_move(g, u, false)?;
    let e2 = twice.equivalence()?;
    let e0 = splice_conversion(g, u)?;
    let e = e2.compose(&e0.inverse()?)?;
    let n = g.len();
    let keep: Vec<usize> = (0..n + 2).collect();
    if !identity_tail(e.u.matrix(), n + 2) || !identity_tail(e.v.matrix(), n + 2) {
        return Err(invalid("composed splice certificate does not reduce to two padding coordinates"));
    }
    let cp = condensation(g);
    let j = cp.component_of(g.index_of(u)?);
    let target = splice_graph(g, u)?;
    let mut labels = cp.vertex_components().to_vec();
    labels.extend([j; 2]);
    let d = Draft {
        kind: MoveKind::CuntzSplice,
        params: MoveParams::Vertex { u: u.into() },
        padding: MultiIndex::unit(cp.len(), j, 2),
        u: e.u.matrix().submatrix(&keep, &keep),
        v: e.v.matrix().submatrix(&keep, &keep),
        target: target.clone(),
        labels,
        unital: false,
    };
    let c = certify(g, d, with_fk)?;
    if let Some(why) = splice_signature(&c)? {
        return Err(invalid(why));
    }
    Ok((target, c))
}

/// Attaches the splice gadget at `u` with a GL_P certificate; requires `B_g ∈ M_P^+`.
pub fn cuntz_splice(g: &Graph, u: &str) -> Result<(Graph, MoveCertificate)> {
    splice_move(g, u, true)
}

/// `det U{i} = 1` everywhere, `det V{i} = 1` except `−1` on the spliced block.
fn splice_signature(c: &MoveCertificate) -> Result<Option<String>> {
    let MoveParams::Vertex { u } = &c.params else {
        return Ok(Some("splice parameters name no vertex".into()));
    };
    let j = condensation(&c.source).component_of(c.source.index_of(u)?);
    let (du, dv) = c.equivalence()?.det_signature()?;
    if !du.iter().all(One::is_one) {
        return Ok(Some(format!("splice U has block determinants {du:?}")));
    }
    for (i, d) in dv.iter().enumerate() {
        let want = if i == j { int(-1) } else { Int::one() };
        if *d != want {
            return Ok(Some(format!("splice V has determinant {d} on block {i}")));
        }
    }
    Ok(None)
}

/// Reorders the vertices: vertex `i` of the result is `order[i]`.
pub fn relabel(g: &Graph, order: &[String]) -> Result<(Graph, MoveCertificate)> {
    sink_free(g)?;
    let perm: Vec<usize> = order.iter().map(|v| g.index_of(v)).collect::<Result<_>>()?;
    let mut seen = vec![false; g.len()];
    if perm.len() != g.len() || perm.iter().any(|&i| std::mem::replace(&mut seen[i], true)) {
        return Err(illegal("relabel order is not a permutation of the vertices"));
    }
    let target = g.permuted(&perm);
    let cp = condensation(g);
    let p = IntMatrix::permutation(&perm);
    let d = Draft {
        kind: MoveKind::Relabel,
        params: MoveParams::Order { order: order.to_vec() },
        padding: MultiIndex::zero(cp.len()),
        u: p.clone(),
        v: p.transpose(),
        target: target.clone(),
        labels: perm.iter().map(|&i| cp.component_of(i)).collect(),
        unital: true,
    };
    Ok((target, certify(g, d, true)?))
}

/// Renames the vertices in place; `U = V = I`.
pub fn rename(g: &Graph, names: &[String]) -> Result<(Graph, MoveCertificate)> {
    sink_free(g)?;
    if names.len() != g.len() {
        return Err(illegal(format!("{} names for {} vertices", names.len(), g.len())));
    }
    let target = Graph::new(names.to_vec(), g.adjacency().clone()).map_err(|e| illegal(format!("rename: {e}")))?;
    let cp = condensation(g);
    let n = g.len();
    let d = Draft {
        kind: MoveKind::Rename,
        params: MoveParams::Names { names: names.to_vec() },
        padding: MultiIndex::zero(cp.len()),
        u: IntMatrix::identity(n),
        v: IntMatrix::identity(n),
        target: target.clone(),
        labels: cp.vertex_components().to_vec(),
        unital: true,
    };
    Ok((target, certify(g, d, true)?))
}

struct Composite {
    u: IntMatrix,
    v: IntMatrix,
    padding: MultiIndex,
    target: Graph,
    labels: Vec<usize>,
    unital: bool,
}

/// Composes steps into one certificate from `source`; padding needed along the
/// way is moved to the source side and sorted by component.
fn compose_steps(source: &Graph, steps: &[ChainStep]) -> Result<Composite> {
    let cp0 = condensation(source);
    let n0 = source.len();
    let mut u = IntMatrix::identity(n0);
    let mut v = IntMatrix::identity(n0);
    let mut pads: Vec<usize> = Vec::new();
    let mut labels = cp0.vertex_components().to_vec();
    let mut cur = source.clone();
    let mut unital = true;
    for (i, step) in steps.iter().enumerate() {
        if *step.source() != cur {
            return Err(invalid(format!("step {i} does not start where the previous step ended")));
        }
        let c = &step.certificate;
        let cpc = condensation(&cur);
        let comp_map: Vec<usize> = cpc.components().iter().map(|vs| labels[vs[0]]).collect();
        let (su, sv, step_pad, step_labels) = if step.inverse {
            if c.padding.total() != 0 {
                return Err(illegal(format!("step {i}: only padding-free certificates can be inverted")));
            }
            let su = c.u.inverse_unimodular().ok_or_else(|| invalid(format!("step {i}: U is not invertible")))?;
            let sv = c.v.inverse_unimodular().ok_or_else(|| invalid(format!("step {i}: V is not invertible")))?;
            let cs = condensation(&c.source);
            let mut back = vec![usize::MAX; cs.len()];
            for (t, &l) in c.target_components.iter().enumerate() {
                back[l] = cpc.component_of(t);
            }
            let sl = (0..c.source.len()).map(|w| back[cs.component_of(w)]).collect();
            (su, sv, Vec::new(), sl)
        } else {
            (c.u.clone(), c.v.clone(), c.padding.labels(), c.target_components.clone())
        };
        let r = step_pad.len();
        let ext = IntMatrix::identity(r);
        u = su.checked_mul(&u.direct_sum(&ext))?;
        v = v.direct_sum(&ext).checked_mul(&sv)?;
        pads.extend(step_pad.iter().map(|&p| comp_map[p]));
        labels = step_labels.iter().map(|&l| comp_map[l]).collect();
        unital &= c.unital;
        cur = step.target().clone();
    }
    let mut order: Vec<usize> = (0..pads.len()).collect();
    order.sort_by_key(|&i| pads[i]);
    let perm: Vec<usize> = (0..n0).chain(order.iter().map(|&i| n0 + i)).collect();
    let mut counts = vec![0; cp0.len()];
    for &p in &pads {
        counts[p] += 1;
    }
    Ok(Composite {
        u: u.select_cols(&perm),
        v: v.select_rows(&perm),
        padding: MultiIndex(counts),
        target: cur,
        labels,
        unital,
    })
}

fn chain_move(source: &Graph, steps: Vec<ChainStep>, with_fk: bool) -> Result<MoveCertificate> {
    sink_free(source)?;
    let c = compose_steps(source, &steps)?;
    let d = Draft {
        kind: MoveKind::ElementaryChain,
        params: MoveParams::Chain { steps },
        padding: c.padding,
        u: c.u,
        v: c.v,
        target: c.target,
        labels: c.labels,
        unital: c.unital,
    };
    certify(source, d, with_fk)
}

/// One certificate for a sequence of moves starting at `source`.
pub fn chain(source: &Graph, steps: Vec<ChainStep>) -> Result<MoveCertificate> {
    chain_move(source, steps, true)
}

/// Small-integer copy of a graph used to score candidate additions.
#[derive(Clone)]
struct Scratch {
    a: Vec<Vec<i64>>,
    label: Vec<usize>,
    below: Vec<Vec<bool>>,
}

impl Scratch {
    fn new(g: &Graph) -> Option<Self> {
        let n = g.len();
        let cp = condensation(g);
        let mut a = vec![vec![0i64; n]; n];
        for (r, row) in a.iter_mut().enumerate() {
            for (c, x) in row.iter_mut().enumerate() {
                *x = g.edges(r, c).to_i64()?;
            }
        }
        let k = cp.len();
        let below = (0..k).map(|i| (0..k).map(|j| cp.poset().leq(j, i)).collect()).collect();
        Some(Scratch { a, label: cp.vertex_components().to_vec(), below })
    }

    fn n(&self) -> usize {
        self.a.len()
    }

    fn b(&self, r: usize, c: usize) -> i64 {
        self.a[r][c] - i64::from(r == c)
    }

    fn allowed(&self, r: usize, c: usize) -> bool {
        self.below[self.label[r]][self.label[c]]
    }

    fn bad(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).filter(|&(r, c)| self.allowed(r, c) && self.b(r, c) <= 0).collect()
    }

    fn distances(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        (0..n)
            .map(|s| {
                let mut d = vec![n + 1; n];
                let mut queue = std::collections::VecDeque::new();
                for t in 0..n {
                    if self.a[s][t] > 0 && d[t] > 1 {
                        d[t] = 1;
                        queue.push_back(t);
                    }
                }
                while let Some(x) = queue.pop_front() {
                    for t in 0..n {
                        if self.a[x][t] > 0 && d[t] > d[x] + 1 {
                            d[t] = d[x] + 1;
                            queue.push_back(t);
                        }
                    }
                }
                d
            })
            .collect()
    }

    fn score(&self) -> i64 {
        let n = self.n() as i64;
        let dist = self.distances();
        self.bad().iter().map(|&(r, c)| 4 * (n + 2) * (1 - self.b(r, c)) + dist[r][c] as i64).sum()
    }

    fn reach(&self) -> Vec<Vec<usize>> {
        self.distances()
    }

    fn apply(&self, row: bool, x: usize, y: usize) -> Option<Scratch> {
        let n = self.n();
        let mut s = self.clone();
        if row {
            for c in 0..n {
                s.a[x][c] += self.b(y, c);
            }
        } else {
            for r in 0..n {
                s.a[r][y] += self.b(r, x);
            }
        }
        if s.a.iter().flatten().any(|&v| v < 0) {
            return None;
        }
        let removed = (0..n).any(|r| (0..n).any(|c| self.a[r][c] > 0 && s.a[r][c] == 0));
        if removed {
            let (before, after) = (self.reach(), s.reach());
            let same = (0..n).all(|r| (0..n).all(|c| (before[r][c] <= n) == (after[r][c] <= n)));
            if !same {
                return None;
            }
        }
        Some(s)
    }

    fn legal(&self, row: bool, x: usize, y: usize) -> bool {
        x != y
            && self.a[x][y] > 0
            && if row { self.a[y].iter().sum::<i64>() >= 1 } else { self.a[x].iter().sum::<i64>() >= 2 }
    }
}

/// Greedy positive additions until every allowed entry of `B` is positive.
fn make_positive(g: &Graph, max_steps: usize, steps: &mut Vec<ChainStep>) -> Result<Graph> {
    let mut cur = g.clone();
    for _ in 0..max_steps {
        let s = Scratch::new(&cur).ok_or_else(|| illegal("edge multiplicity too large for the greedy search"))?;
        let bad = s.bad();
        if bad.is_empty() {
            return Ok(cur);
        }
        let base = s.score();
        let mut rows: Vec<usize> = bad.iter().map(|&(r, _)| r).collect();
        let mut cols: Vec<usize> = bad.iter().map(|&(_, c)| c).collect();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        let n = s.n();
        let mut best: Option<(i64, bool, usize, usize)> = None;
        let mut consider = |row: bool, x: usize, y: usize| {
            if !s.legal(row, x, y) {
                return;
            }
            if let Some(t) = s.apply(row, x, y) {
                let sc = t.score();
                if sc < base && best.is_none_or(|b| sc < b.0) {
                    best = Some((sc, row, x, y));
                }
            }
        };
        for &r in &rows {
            for t in 0..n {
                consider(true, r, t);
            }
        }
        for &c in &cols {
            for u in 0..n {
                consider(false, u, c);
            }
        }
        let Some((_, row, x, y)) = best else {
            let (r, c) = bad[0];
            return Err(illegal(format!(
                "greedy positivity stuck at entry ({}, {})",
                cur.vertex(r),
                cur.vertex(c)
            )));
        };
        let (ux, uy) = (cur.vertex(x).to_string(), cur.vertex(y).to_string());
        let (next, cert) = add_move(&cur, &ux, &uy, row, false)?;
        steps.push(ChainStep::forward(cert));
        cur = next;
    }
    Err(illegal(format!("greedy positivity did not finish within {max_steps} additions")))
}

fn greedy_budget(g: &Graph) -> usize {
    let n = g.len() + 4;
    20 * n * n + 100
}

/// Grows block `j` by one vertex while keeping `B` in `M_P^+`.
pub fn enlarge_block(g: &Graph, j: usize) -> Result<(Graph, MoveCertificate)> {
    enlarge_move(g, j, true)
}

fn enlarge_move(g: &Graph, j: usize, with_fk: bool) -> Result<(Graph, MoveCertificate)> {
    standard_form(g)?;
    let cp = condensation(g);
    let block = cp.components().get(j).ok_or_else(|| illegal(format!("no component {j}")))?;
    let v0 = *block.last().expect("components are nonempty");
    let v1 = block
        .iter()
        .copied()
        .filter(|&w| w != v0)
        .max_by(|&x, &y| g.edges(v0, x).cmp(g.edges(v0, y)).then(y.cmp(&x)))
        .ok_or_else(|| illegal("block has a single vertex"))?;
    let (n0, n1) = (g.vertex(v0).to_string(), g.vertex(v1).to_string());
    let mut steps = Vec::new();
    let (g1, c1) = expand_move(g, &n0, &n1, false)?;
    let vp = g1.vertex(g1.len() - 1).to_string();
    steps.push(ChainStep::forward(c1));
    let recipe = [(false, n0.clone(), vp.clone()), (true, vp.clone(), n1.clone()), (true, vp.clone(), n1.clone())];
    let mut cur = g1;
    for (i, (row, x, y)) in recipe.iter().enumerate() {
        let (next, c) = add_move(&cur, x, y, *row, false).map_err(|e| illegal(format!("enlarge step {}: {e}", i + 2)))?;
        steps.push(ChainStep::forward(c));
        cur = next;
    }
    let budget = greedy_budget(&cur);
    let target = make_positive(&cur, budget, &mut steps)?;
    let comp = compose_steps(g, &steps)?;
    let b = BlockMatrix::square(cp.poset().clone(), comp.labels.clone(), target.b_matrix())?;
    if let Some(why) = b.mp_plus_failure() {
        return Err(illegal(format!("enlarged graph leaves M_P^+: {why}")));
    }
    let mut want = cp.sizes();
    want[j] += 1;
    if b.row_index().0 != want {
        return Err(illegal("enlargement changed the wrong block"));
    }
    let d = Draft {
        kind: MoveKind::EnlargeBlock,
        params: MoveParams::Enlarge { component: j, steps },
        padding: comp.padding,
        u: comp.u,
        v: comp.v,
        target: target.clone(),
        labels: comp.labels,
        unital: false,
    };
    Ok((target, certify(g, d, with_fk)?))
}

/// Number of unit invariant factors of `b`.
fn unit_factors(b: &IntMatrix) -> usize {
    smith_normal_form(b).diagonal().iter().filter(|d| d.abs().is_one()).count()
}

/// Brings a graph whose components are all proper into `M_P^+` by edge
/// expansions and positive additions.
pub fn standardize(g: &Graph) -> Result<(Graph, MoveCertificate)> {
    sink_free(g)?;
    let cp = condensation(g);
    if let Some(c) = cp.kinds().iter().position(|&k| k != ComponentKind::Proper) {
        return Err(Error::Precondition(format!("component {c} is not proper; standard form needs proper components")));
    }
    let block = BlockMatrix::from_graph_with(g, &cp)?;
    let mut steps = Vec::new();
    let mut cur = g.clone();
    for (j, members) in cp.components().iter().enumerate() {
        let need = [3usize.saturating_sub(members.len()), 2usize.saturating_sub(unit_factors(&block.diagonal_block(j)))];
        let anchor = g.vertex(members[0]).to_string();
        for _ in 0..need.into_iter().max().unwrap_or(0) {
            let cc = condensation(&cur);
            let cj = cc.component_of(cur.index_of(&anchor)?);
            let inside = &cc.components()[cj];
            let (s, r) = inside
                .iter()
                .flat_map(|&s| inside.iter().map(move |&r| (s, r)))
                .max_by(|&(s1, r1), &(s2, r2)| cur.edges(s1, r1).cmp(cur.edges(s2, r2)).then((s2, r2).cmp(&(s1, r1))))
                .expect("nonempty component");
            let (sn, rn) = (cur.vertex(s).to_string(), cur.vertex(r).to_string());
            let (next, c) = expand_move(&cur, &sn, &rn, false)?;
            steps.push(ChainStep::forward(c));
            cur = next;
        }
    }
    let budget = greedy_budget(&cur);
    let target = make_positive(&cur, budget, &mut steps)?;
    let c = chain_move(g, steps, true)?;
    if let Some(why) = c.target_block()?.mp_plus_failure() {
        return Err(illegal(format!("standardization did not reach M_P^+: {why}")));
    }
    Ok((target, c))
}

fn replay(c: &MoveCertificate) -> Result<MoveCertificate> {
    use MoveKind as K;
    use MoveParams as P;
    let g = &c.source;
    let out = match (&c.kind, &c.params) {
        (K::RowAdd, P::Pair { u, v }) => row_add(g, u, v)?.1,
        (K::ColAdd, P::Pair { u, v }) => col_add(g, u, v)?.1,
        (K::EdgeExpand, P::Edge { source, range }) => edge_expand(g, source, range)?.1,
        (K::CuntzSpliceTwice, P::Vertex { u }) => cuntz_splice_twice(g, u)?.1,
        (K::CuntzSplice, P::Vertex { u }) => cuntz_splice(g, u)?.1,
        (K::Relabel, P::Order { order }) => relabel(g, order)?.1,
        (K::Rename, P::Names { names }) => rename(g, names)?.1,
        (K::ElementaryChain, P::Chain { steps }) => {
            for (i, s) in steps.iter().enumerate() {
                check_certificate(&s.certificate).map_err(|e| invalid(format!("step {i}: {e}")))?;
            }
            chain(g, steps.clone())?
        }
        (K::EnlargeBlock, P::Enlarge { component, .. }) => enlarge_block(g, *component)?.1,
        (k, _) => return Err(invalid(format!("parameters do not fit a {k:?} move"))),
    };
    Ok(out)
}

/// Replays the move from the source and parameters and checks every claim of
/// the certificate, reporting the first failure.
pub fn check_certificate(c: &MoveCertificate) -> Result<()> {
    let e = c.equivalence()?;
    if let Some(why) = e.check(c.requires_sl()) {
        return Err(invalid(why));
    }
    if c.kind == MoveKind::CuntzSplice {
        if let Some(why) = splice_signature(c)? {
            return Err(invalid(why));
        }
    }
    let fresh = replay(c)?;
    if fresh.padding != c.padding {
        return Err(invalid("padding differs from the replayed move"));
    }
    if fresh.target != c.target || fresh.target_components != c.target_components {
        return Err(invalid("target differs from the replayed move"));
    }
    if fresh.u != c.u || fresh.v != c.v {
        return Err(invalid("U or V differs from the replayed move"));
    }
    if fresh.unital != c.unital {
        return Err(invalid("unital flag differs from the replayed move"));
    }
    c.induced_iso()?;
    Ok(())
}

pub fn verify_certificate(c: &MoveCertificate) -> bool {
    check_certificate(c).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g2(rows: &[[i64; 2]]) -> Graph {
        Graph::new(vec!["a".into(), "b".into()], IntMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn row_add_example() {
        let g = g2(&[[2, 1], [1, 2]]);
        let (f, c) = row_add(&g, "a", "b").unwrap();
        assert_eq!(f.b_matrix(), IntMatrix::from_rows(&[[2, 2], [1, 1]]));
        assert!(c.unital);
        assert!(verify_certificate(&c));
    }

    #[test]
    fn col_add_example() {
        let g = g2(&[[2, 1], [1, 2]]);
        let (f, c) = col_add(&g, "a", "b").unwrap();
        assert_eq!(f.b_matrix(), IntMatrix::from_rows(&[[1, 2], [1, 2]]));
        assert!(!c.unital);
        assert!(verify_certificate(&c));
    }

    #[test]
    fn additions_need_an_edge() {
        let g = g2(&[[3, 0], [1, 3]]);
        assert!(matches!(row_add(&g, "a", "b"), Err(Error::IllegalMove(_))));
        assert!(matches!(col_add(&g, "a", "b"), Err(Error::IllegalMove(_))));
        let (_, c) = row_add(&g, "b", "a").unwrap();
        assert!(verify_certificate(&c));
    }

    #[test]
    fn expand_single_vertex() {
        let g = Graph::bouquet(2);
        let (f, c) = edge_expand(&g, "v", "v").unwrap();
        assert_eq!(f.b_matrix(), IntMatrix::from_rows(&[[0, 1], [1, -1]]));
        assert_eq!(c.u, IntMatrix::from_rows(&[[1, -1], [0, 1]]));
        assert_eq!(c.v, IntMatrix::from_rows(&[[1, 0], [-1, 1]]));
        assert!(verify_certificate(&c));
    }

    #[test]
    fn expand_rejects_edges_off_cycles() {
        let g = g2(&[[3, 1], [0, 3]]);
        assert!(edge_expand(&g, "a", "b").is_err());
    }

    fn standard_example() -> Graph {
        Graph::new(vec!["x".into(), "y".into(), "z".into()], IntMatrix::from_rows(&[[2, 1, 1], [1, 2, 1], [1, 1, 3]]))
            .unwrap()
    }

    #[test]
    fn splices_on_standard_form() {
        let g = standard_example();
        assert!(BlockMatrix::from_graph(&g).unwrap().classify().in_mp_plus);
        let (t, c2) = cuntz_splice_twice(&g, "x").unwrap();
        assert_eq!(t.len(), 7);
        assert!(verify_certificate(&c2));
        let (s, c1) = cuntz_splice(&g, "x").unwrap();
        assert_eq!(s.vertices()[3], "x#v1");
        let mut u = IntMatrix::identity(5);
        u[(0, 4)] = Int::one();
        assert_eq!(c1.u, u);
        assert!(verify_certificate(&c1));
    }

    #[test]
    fn splice_needs_standard_form() {
        assert!(cuntz_splice(&Graph::bouquet(2), "v").is_err());
        let s = splice_graph(&Graph::bouquet(2), "v").unwrap();
        assert_eq!(s.b_matrix(), IntMatrix::from_rows(&[[1, 1, 0], [1, 0, 1], [0, 1, 0]]));
    }

    #[test]
    fn conversion_on_a_loop() {
        let g = Graph::bouquet(2);
        let e = splice_conversion(&g, "v").unwrap();
        let (du, dv) = e.det_signature().unwrap();
        assert_eq!((du, dv), (vec![int(1)], vec![int(-1)]));
    }

    #[test]
    fn tampering_is_detected() {
        let g = standard_example();
        let (_, c) = row_add(&g, "x", "y").unwrap();
        let mut bad = c.clone();
        bad.u[(0, 1)] += Int::one();
        assert!(!verify_certificate(&bad));
        let mut bad = c.clone();
        bad.padding = MultiIndex(vec![1]);
        assert!(!verify_certificate(&bad));
        let json = serde_json::to_string(&c).unwrap();
        let back: MoveCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn chains_compose_and_invert() {
        let g = standard_example();
        let (g1, c1) = row_add(&g, "x", "y").unwrap();
        let (g2, c2) = edge_expand(&g1, "z", "x").unwrap();
        let (_, c3) = col_add(&g2, "y", "z").unwrap();
        let c = chain(&g, vec![ChainStep::forward(c1.clone()), ChainStep::forward(c2), ChainStep::forward(c3)]).unwrap();
        assert_eq!(c.padding.total(), 1);
        assert!(verify_certificate(&c));
        let back = chain(&g, vec![ChainStep::forward(c1.clone()), ChainStep::backward(c1)]).unwrap();
        assert_eq!(back.target, g);
        assert!(back.u.is_identity() && back.v.is_identity());
    }

    #[test]
    fn relabel_reverses() {
        let g = standard_example();
        let order: Vec<String> = ["z", "y", "x"].iter().map(|s| s.to_string()).collect();
        let (t, c) = relabel(&g, &order).unwrap();
        assert_eq!(t.vertices(), &order[..]);
        assert!(verify_certificate(&c));
    }

    #[test]
    fn rename_keeps_the_matrix() {
        let g = standard_example();
        let names: Vec<String> = ["p", "q", "r"].iter().map(|s| s.to_string()).collect();
        let (t, c) = rename(&g, &names).unwrap();
        assert_eq!(t.b_matrix(), g.b_matrix());
        assert!(c.u.is_identity());
        assert!(verify_certificate(&c));
        assert!(rename(&g, &names[..2]).is_err());
    }

    #[test]
    fn enlarge_and_standardize() {
        let g = standard_example();
        let (t, c) = enlarge_block(&g, 0).unwrap();
        assert_eq!(t.len(), 4);
        assert!(c.target_block().unwrap().classify().in_mp_plus);
        assert!(verify_certificate(&c));
        let (s, c) = standardize(&Graph::bouquet(3)).unwrap();
        assert!(s.len() >= 3);
        assert!(c.target_block().unwrap().classify().in_mp_plus);
        assert!(verify_certificate(&c));
    }
}
