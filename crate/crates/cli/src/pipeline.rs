//! Comparison of two graphs: necessary invariants, an FK isomorphism, and
//! when possible a replayable chain of certified moves realizing it.
//!
//! The chain is a zig-zag `G1 → M ← G2`: both graphs are standardized,
//! enlarged to the same block sizes, and aligned; a K-theory isomorphism is
//! lifted to a GL_P-equivalence; block determinants are repaired with Cuntz
//! splices and sign flips on padding; both sides are made positive again and
//! the remaining SL_P-equivalence is factored into positive additions.

use fkr_core::fk::{compare_necessary, find_fk_iso, fk_invariant, induced_iso, preserves_unit, FKInvariant, FKIso, SearchOutcome};
use fkr_core::graphcore::{condensation, ComponentKind, Graph, Poset};
use fkr_core::intlin::{int, kernel_basis, Int, IntMatrix, LinearSolver};
use fkr_core::lift::{lift_poset, positive_factor, KWebIso, Lift};
use fkr_core::moves::{
    chain, check_certificate, cuntz_splice, edge_expand, enlarge_block, relabel, rename, standardize, ChainStep,
    MoveCertificate, MoveParams,
};
use fkr_core::posetblock::{BlockMatrix, Equivalence};
use fkr_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    IsomorphicCertified,
    IsomorphicInvariantOnly,
    NotIsomorphic,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub verdict: Verdict,
    /// `[G1 → M, G2 → M]` when certified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_chain: Option<Vec<MoveCertificate>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fk_iso: Option<FKIso>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unital_verdict: Option<bool>,
    pub log: Vec<String>,
}

impl PipelineReport {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::IsomorphicCertified | Verdict::IsomorphicInvariantOnly => 0,
            Verdict::NotIsomorphic => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CompareOptions {
    pub unital: bool,
    pub certify: bool,
    pub budget: u64,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { unital: false, certify: true, budget: fkr_core::lift::DEFAULT_BUDGET, seed: 0 }
    }
}

/// Lift seeds tried before settling for a matrix-backed isomorphism.
const LIFT_ATTEMPTS: u64 = 3;

fn report(verdict: Verdict, log: Vec<String>) -> PipelineReport {
    PipelineReport { verdict, certificate_chain: None, fk_iso: None, unital_verdict: None, log }
}

/// The full comparison on two graphs. Errors are data errors in the inputs.
pub fn compare(g1: &Graph, g2: &Graph, opts: &CompareOptions) -> Result<PipelineReport> {
    let mut log = Vec::new();
    let inv1 = fk_invariant(g1)?;
    let inv2 = fk_invariant(g2)?;
    log.push(format!("step 1: invariants computed ({} and {} points)", inv1.len(), inv2.len()));
    log.push("step 2: inputs are graphs".to_string());
    if g1 == g2 {
        log.push("graphs are identical: empty chain".to_string());
        let iso = FKIso::identity(&inv1);
        let unital = opts.unital.then(|| preserves_unit(&iso, &inv1, &inv1)).transpose()?;
        return Ok(PipelineReport {
            verdict: Verdict::IsomorphicCertified,
            certificate_chain: Some(Vec::new()),
            fk_iso: Some(iso),
            unital_verdict: unital,
            log,
        });
    }
    let necessary = compare_necessary(&inv1, &inv2);
    if !necessary.isomorphic_possible {
        log.push("necessary invariants differ".to_string());
        return Ok(report(Verdict::NotIsomorphic, log));
    }
    let phi = match find_fk_iso(&inv1, &inv2, opts.budget, opts.seed) {
        SearchOutcome::Found(phi) => phi,
        SearchOutcome::NotIsomorphic => {
            log.push("no compatible poset isomorphism was found after the necessary checks passed".to_string());
            return Ok(report(Verdict::Inconclusive, log));
        }
        SearchOutcome::Inconclusive => {
            log.push(format!("no FK isomorphism found within budget {}", opts.budget));
            return Ok(report(Verdict::Inconclusive, log));
        }
    };
    log.push(format!("FK isomorphism found with rho = {:?}", phi.rho));
    let mut iso = phi.clone();
    if opts.certify {
        for attempt in 0..LIFT_ATTEMPTS {
            let seeded = CompareOptions { seed: opts.seed.wrapping_add(attempt), ..*opts };
            if attempt > 0 {
                log.push(format!("retrying steps 4 to 6 with seed {}", seeded.seed));
            }
            match certify_pair(g1, g2, &inv1, &inv2, &phi, &seeded, &mut log) {
                Ok(Outcome::Certified(chain, iso)) => {
                    let unital = opts.unital.then(|| preserves_unit(&iso, &inv1, &inv2)).transpose()?;
                    return Ok(PipelineReport {
                        verdict: Verdict::IsomorphicCertified,
                        certificate_chain: Some(chain),
                        fk_iso: Some(iso),
                        unital_verdict: unital,
                        log,
                    });
                }
                Ok(Outcome::Backed(backed)) => {
                    if iso.total.is_none() {
                        log.push("matrix-backed isomorphism kept from a verified GL_P-equivalence".to_string());
                        iso = backed;
                    }
                }
                Ok(Outcome::Failed) => break,
                Err(e) => {
                    log.push(format!("certification failed: {e}"));
                    break;
                }
            }
        }
    }
    let unital = if opts.unital && iso.total.is_some() {
        Some(preserves_unit(&iso, &inv1, &inv2)?)
    } else {
        if opts.unital {
            log.push("unit class not decided: the isomorphism is not matrix-backed".to_string());
        }
        None
    };
    Ok(PipelineReport {
        verdict: Verdict::IsomorphicInvariantOnly,
        certificate_chain: None,
        fk_iso: Some(iso),
        unital_verdict: unital,
        log,
    })
}

/// A sequence of moves from `start`, with each current vertex labeled by a
/// component of `start`.
struct Leg {
    start: Graph,
    steps: Vec<ChainStep>,
    cur: Graph,
    labels: Vec<usize>,
}

impl Leg {
    fn new(g: &Graph) -> Self {
        Leg {
            start: g.clone(),
            steps: Vec::new(),
            cur: g.clone(),
            labels: condensation(g).vertex_components().to_vec(),
        }
    }

    fn push(&mut self, c: MoveCertificate) {
        let cs = condensation(&self.cur);
        let lab: Vec<usize> = cs.components().iter().map(|vs| self.labels[vs[0]]).collect();
        self.labels = c.target_components.iter().map(|&k| lab[k]).collect();
        self.cur = c.target.clone();
        self.steps.push(ChainStep::forward(c));
    }

    fn push_nonempty(&mut self, c: MoveCertificate) {
        let empty = matches!(&c.params, MoveParams::Chain { steps } if steps.is_empty());
        if !empty {
            self.push(c);
        }
    }

    fn count(&self, label: usize) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    fn vertex_with(&self, label: usize) -> Result<usize> {
        self.labels.iter().position(|&l| l == label).ok_or_else(|| Error::Precondition(format!("no vertex in component {label}")))
    }

    /// Component of the current graph carrying `label`.
    fn component(&self, label: usize) -> Result<usize> {
        Ok(condensation(&self.cur).component_of(self.vertex_with(label)?))
    }

    fn state(&self) -> usize {
        self.steps.len()
    }

    fn since(&self, mark: usize, from: &Graph) -> Result<MoveCertificate> {
        chain(from, self.steps[mark..].to_vec())
    }

    fn certificate(&self) -> Result<MoveCertificate> {
        chain(&self.start, self.steps.clone())
    }
}

fn opposite(p: &Poset) -> Poset {
    Poset::from_relation((0..p.len()).map(|i| (0..p.len()).map(|j| p.leq(j, i)).collect()).collect())
}

/// `T` with `basis·T = vectors`.
fn coordinates(basis: &IntMatrix, vectors: &IntMatrix) -> Result<IntMatrix> {
    let solver = LinearSolver::new(basis);
    let cols = (0..vectors.cols())
        .map(|j| solver.particular(&vectors.col(j))?.ok_or_else(|| Error::InvalidCertificate("kernel bases differ".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_columns(basis.cols(), &cols))
}

/// Relabels components through `map` and moves padding coordinates (those
/// past `n`) into component order.
fn transport(e: &Equivalence, poset: &Poset, map: &[usize], n: usize) -> Result<Equivalence> {
    let src = e.source.relabel(poset.clone(), map)?;
    let tgt = e.target.relabel(poset.clone(), map)?;
    let total = src.row_comp().len();
    let mut pads: Vec<usize> = (n..total).collect();
    pads.sort_by_key(|&i| src.row_comp()[i]);
    let perm: Vec<usize> = (0..n).chain(pads).collect();
    let source = src.permuted(&perm, &perm);
    let u = BlockMatrix::new(poset.clone(), tgt.row_comp().to_vec(), source.row_comp().to_vec(), e.u.matrix().select_cols(&perm))?;
    let v = BlockMatrix::new(poset.clone(), source.col_comp().to_vec(), tgt.col_comp().to_vec(), e.v.matrix().select_rows(&perm))?;
    Ok(Equivalence { u, v, source, target: tgt })
}

/// `map[c]` for a component `c` of `g`: the label its vertices carry.
fn component_labels(g: &Graph, labels: &[usize]) -> Vec<usize> {
    condensation(g).components().iter().map(|vs| labels[vs[0]]).collect()
}

/// Order of `leg`'s vertices matching `want` position by position, with an
/// even permutation inside every label class when `even` is set.
fn aligned_order(leg_labels: &[usize], want: &[usize], even: bool) -> Result<Vec<usize>> {
    let mut used = vec![false; leg_labels.len()];
    let mut perm = Vec::with_capacity(want.len());
    for &l in want {
        let i = (0..leg_labels.len())
            .find(|&i| !used[i] && leg_labels[i] == l)
            .ok_or_else(|| Error::Precondition("block sizes differ after enlargement".into()))?;
        used[i] = true;
        perm.push(i);
    }
    if perm.len() != leg_labels.len() {
        return Err(Error::Precondition("vertex counts differ after enlargement".into()));
    }
    if even {
        let mut classes: Vec<usize> = want.to_vec();
        classes.sort_unstable();
        classes.dedup();
        for l in classes {
            let pos: Vec<usize> = (0..want.len()).filter(|&i| want[i] == l).collect();
            let seq: Vec<usize> = pos.iter().map(|&i| perm[i]).collect();
            let inversions = (0..seq.len()).flat_map(|a| (a + 1..seq.len()).map(move |b| (a, b))).filter(|&(a, b)| seq[a] > seq[b]).count();
            if inversions % 2 == 1 {
                if pos.len() < 2 {
                    return Err(Error::Precondition("cannot fix the sign of a one-vertex block".into()));
                }
                perm.swap(pos[0], pos[1]);
            }
        }
    }
    Ok(perm)
}

fn names(g: &Graph, perm: &[usize]) -> Vec<String> {
    perm.iter().map(|&i| g.vertex(i).to_string()).collect()
}

/// An edge of `g` inside the component of vertex `v`.
fn internal_edge(g: &Graph, v: usize) -> Result<(String, String)> {
    let cp = condensation(g);
    let members = &cp.components()[cp.component_of(v)];
    for &s in members {
        for &r in members {
            if *g.edges(s, r) != Int::from(0) {
                return Ok((g.vertex(s).to_string(), g.vertex(r).to_string()));
            }
        }
    }
    Err(Error::Precondition("component has no internal edge".into()))
}

fn kweb_from_fk(
    iso: &FKIso,
    inv1: &FKInvariant,
    inv2: &FKInvariant,
    bt1: &BlockMatrix,
    bt2: &BlockMatrix,
    s2_comp_of: &[usize],
) -> Result<KWebIso> {
    let p = bt1.poset();
    let mut d = Vec::new();
    let mut psi = Vec::new();
    for i in 0..p.len() {
        let p1 = inv1.points().iter().position(|&c| c == i).ok_or_else(|| Error::Precondition("component is not a point".into()))?;
        let q = iso.rho[p1];
        if inv2.points()[q] != s2_comp_of[i] {
            return Err(Error::InvalidCertificate("point correspondence differs from the vertex alignment".into()));
        }
        let rows = bt2.rows_in(fkr_core::graphcore::CompSet::singleton(i));
        let cols = bt1.rows_in(fkr_core::graphcore::CompSet::singleton(i));
        let (s1, s2) = (inv1.simple(p1), inv2.simple(q));
        if s1.vertices != cols || s2.vertices != rows || s1.regular != s1.vertices || s2.regular != s2.vertices {
            return Err(Error::Precondition("subquotient coordinates are not the diagonal blocks".into()));
        }
        d.push(iso.k0_simple[p1].clone());
        let minimal = (0..p.len()).all(|k| k == i || !p.lt(k, i));
        if minimal {
            let k1 = kernel_basis(&bt1.diagonal_block(i));
            let k2 = kernel_basis(&bt2.diagonal_block(i));
            let c1 = coordinates(&k1, &s1.k1_basis)?;
            let c2 = coordinates(&k2, &s2.k1_basis)?;
            let c1inv = c1.inverse_unimodular().ok_or_else(|| Error::InvalidCertificate("kernel bases differ".into()))?;
            psi.push(Some(&(&c2 * &iso.k1_simple[p1]) * &c1inv));
        } else {
            psi.push(None);
        }
    }
    Ok(KWebIso { d, psi })
}

enum Outcome {
    Certified(Vec<MoveCertificate>, FKIso),
    /// Both legs replay and a verified SL_P-equivalence joins their ends, but
    /// it was not factored into moves.
    Backed(FKIso),
    Failed,
}

fn certify_pair(
    g1: &Graph,
    g2: &Graph,
    inv1: &FKInvariant,
    inv2: &FKInvariant,
    phi: &FKIso,
    opts: &CompareOptions,
    log: &mut Vec<String>,
) -> Result<Outcome> {
    let (cp1, cp2) = (condensation(g1), condensation(g2));
    if cp1.kinds().iter().chain(cp2.kinds()).any(|&k| k != ComponentKind::Proper) {
        log.push("certification skipped: it needs every component to be proper".to_string());
        return Ok(Outcome::Failed);
    }
    // G1 component -> G2 component, and back
    let forward: Vec<usize> = (0..cp1.len())
        .map(|c| {
            let p = inv1.points().iter().position(|&x| x == c).expect("all components are points");
            inv2.points()[phi.rho[p]]
        })
        .collect();
    let mut back = vec![0; forward.len()];
    for (c, &c2) in forward.iter().enumerate() {
        back[c2] = c;
    }

    // Standard form and equal block sizes.
    let mut leg1 = Leg::new(g1);
    let mut leg2 = Leg::new(g2);
    leg1.push_nonempty(standardize(&leg1.cur)?.1);
    leg2.push_nonempty(standardize(&leg2.cur)?.1);
    for c in 0..cp1.len() {
        while leg1.count(c) < leg2.count(forward[c]) {
            let j = leg1.component(c)?;
            leg1.push(enlarge_block(&leg1.cur, j)?.1);
        }
        while leg2.count(forward[c]) < leg1.count(c) {
            let j = leg2.component(forward[c])?;
            leg2.push(enlarge_block(&leg2.cur, j)?.1);
        }
    }
    let leg2_in_1: Vec<usize> = leg2.labels.iter().map(|&l| back[l]).collect();
    let perm = aligned_order(&leg2_in_1, &leg1.labels, false)?;
    if perm.iter().enumerate().any(|(i, &p)| i != p) {
        let order = names(&leg2.cur, &perm);
        leg2.push(relabel(&leg2.cur, &order)?.1);
    }
    log.push(format!("step 3: standard forms with {} vertices", leg1.cur.len()));

    // Lift the K-theory isomorphism.
    let s1 = leg1.cur.clone();
    let s2 = leg2.cur.clone();
    let inv_s1 = fk_invariant(&s1)?;
    let inv_s2 = fk_invariant(&s2)?;
    let iota1 = leg1.certificate()?.induced_iso()?.ok_or_else(|| Error::Precondition("no invariant after standardization".into()))?;
    let iota2 = leg2.certificate()?.induced_iso()?.ok_or_else(|| Error::Precondition("no invariant after standardization".into()))?;
    let phi_s = iota1
        .inverse(inv1, &inv_s1)?
        .then(phi, &inv_s1, inv1)?
        .then(&iota2, &inv_s1, inv2)?;
    let cps1 = condensation(&s1);
    let cps2 = condensation(&s2);
    let poset = cps1.poset().clone();
    let lab = cps1.vertex_components().to_vec();
    let b1 = BlockMatrix::square(poset.clone(), lab.clone(), s1.b_matrix())?;
    let b2 = BlockMatrix::square(poset.clone(), lab.clone(), s2.b_matrix())?;
    let s2_comp_of: Vec<usize> = (0..cps1.len()).map(|i| cps2.component_of(cps1.components()[i][0])).collect();
    let op = opposite(&poset);
    let bt1 = BlockMatrix::square(op.clone(), lab.clone(), s1.b_matrix().transpose())?;
    let bt2 = BlockMatrix::square(op.clone(), lab.clone(), s2.b_matrix().transpose())?;
    let kweb = kweb_from_fk(&phi_s, &inv_s1, &inv_s2, &bt1, &bt2, &s2_comp_of)?;
    let et = match lift_poset(&bt1, &bt2, &kweb, opts.budget, opts.seed)? {
        Lift::Found(e) => e,
        Lift::Absent(why) | Lift::Inconclusive(why) => {
            log.push(format!("step 4: lift not found: {why}"));
            return Ok(Outcome::Failed);
        }
    };
    let sq = |m: IntMatrix| BlockMatrix::square(poset.clone(), lab.clone(), m);
    let e = Equivalence { u: sq(et.v.matrix().transpose())?, v: sq(et.u.matrix().transpose())?, source: b1, target: b2 };
    if let Some(why) = e.check(false) {
        return Err(Error::InvalidCertificate(format!("transposed lift: {why}")));
    }
    log.push("step 4: K-theory isomorphism lifted to a GL_P-equivalence".to_string());

    // Determinant repair.
    let (du, dv) = e.det_signature()?;
    let minus = int(-1);
    let flip_u: Vec<usize> = (0..du.len()).filter(|&j| du[j] == minus).collect();
    let flip_v: Vec<usize> = (0..dv.len()).filter(|&j| (dv[j] == minus) != flip_u.contains(&j)).collect();
    let s1_to_g1 = component_labels(&s1, &leg1.labels);
    let mut f = e;
    if !flip_u.is_empty() || !flip_v.is_empty() {
        let (mark1, mark2) = (leg1.state(), leg2.state());
        for &j in &flip_v {
            let v = leg1.vertex_with(s1_to_g1[j])?;
            let name = leg1.cur.vertex(v).to_string();
            leg1.push(cuntz_splice(&leg1.cur, &name)?.1);
            leg1.push_nonempty(standardize(&leg1.cur)?.1);
        }
        for &j in flip_u.iter().filter(|j| !flip_v.contains(j)) {
            let v = leg1.vertex_with(s1_to_g1[j])?;
            let (s, r) = internal_edge(&leg1.cur, v)?;
            leg1.push(edge_expand(&leg1.cur, &s, &r)?.1);
        }
        leg1.push_nonempty(standardize(&leg1.cur)?.1);
        let l_cert = leg1.since(mark1, &s1)?;
        let a = l_cert.padding.clone();
        for (j, &times) in a.0.iter().enumerate() {
            for _ in 0..times {
                let v = leg2.vertex_with(forward[s1_to_g1[j]])?;
                let (s, r) = internal_edge(&leg2.cur, v)?;
                leg2.push(edge_expand(&leg2.cur, &s, &r)?.1);
            }
        }
        leg2.push_nonempty(standardize(&leg2.cur)?.1);
        let r_cert = leg2.since(mark2, &s2)?;
        let s2_to_s1: Vec<usize> = (0..cps2.len()).map(|c| lab[cps2.components()[c][0]]).collect();
        let mut r_pad = vec![0; a.len()];
        for (c, &k) in r_cert.padding.0.iter().enumerate() {
            r_pad[s2_to_s1[c]] += k;
        }
        if r_pad != a.0 {
            return Err(Error::Precondition("padding of the two sides differs".into()));
        }
        let el = l_cert.equivalence()?;
        let er = transport(&r_cert.equivalence()?, &poset, &s2_to_s1, s2.len())?;
        let mut ep = f.pad(&a.labels());
        let n = s1.len();
        let pad_labels = a.labels();
        let mut u = ep.u.matrix().clone();
        let mut v = ep.v.matrix().clone();
        for &j in &flip_u {
            let k = n + pad_labels.iter().position(|&l| l == j).expect("padding on a flipped block");
            u[(k, k)] = minus.clone();
            v[(k, k)] = minus.clone();
        }
        ep.u = ep.u.with_matrix(u)?;
        ep.v = ep.v.with_matrix(v)?;
        f = el.inverse()?.compose(&ep)?.compose(&er)?;
        log.push(format!(
            "step 5: {} splice(s) and {} sign flip(s) on padding",
            flip_v.len(),
            flip_u.len()
        ));
    } else {
        log.push("step 5: determinants already 1".to_string());
    }

    // Align, then factor into positive additions.
    let t1 = leg1.cur.clone();
    let target_labels = f.target.row_comp().to_vec();
    let perm = aligned_order(&target_labels, f.source.row_comp(), true)?;
    if perm.iter().enumerate().any(|(i, &p)| i != p) {
        let order = names(&leg2.cur, &perm);
        let (_, rc) = relabel(&leg2.cur, &order)?;
        let t2cond = component_labels(&leg2.cur, &target_labels);
        let er = transport(&rc.equivalence()?, &poset, &t2cond, leg2.cur.len())?;
        f = f.compose(&er)?;
        leg2.push(rc);
    }
    if let Some(why) = f.check(true) {
        return Err(Error::InvalidCertificate(format!("repaired equivalence: {why}")));
    }
    let t2 = leg2.cur.clone();
    match positive_factor(&t1, &f, opts.budget)? {
        Lift::Found(c) => {
            log.push(format!("step 6: {} positive additions", match &c.params {
                MoveParams::Chain { steps } => steps.len(),
                _ => 1,
            }));
            leg1.push_nonempty(c);
        }
        Lift::Absent(why) | Lift::Inconclusive(why) => {
            log.push(format!("step 6: positive factorization not found: {why}"));
            return backed(&leg1, &leg2, &f, inv1, inv2).map(Outcome::Backed);
        }
    }
    if leg1.cur.vertices() != t2.vertices() {
        leg1.push(rename(&leg1.cur, t2.vertices())?.1);
    }
    if leg1.cur != t2 {
        return Err(Error::InvalidCertificate("the two legs end at different graphs".into()));
    }

    let c1 = leg1.certificate()?;
    let c2 = leg2.certificate()?;
    check_certificate(&c1)?;
    check_certificate(&c2)?;
    let inv_m = fk_invariant(&c1.target)?;
    let i1 = c1.induced_iso()?.ok_or_else(|| Error::Precondition("no invariant at the meeting graph".into()))?;
    let i2 = c2.induced_iso()?.ok_or_else(|| Error::Precondition("no invariant at the meeting graph".into()))?;
    let iso = i1.then(&i2.inverse(inv2, &inv_m)?, inv1, &inv_m)?;
    iso.check(inv1, inv2).map_err(|e| Error::InvalidCertificate(format!("composite isomorphism: {e}")))?;
    log.push(format!("certified: both legs replay and meet at a graph with {} vertices", t2.len()));
    Ok(Outcome::Certified(vec![c1, c2], iso))
}

/// The isomorphism `G1 → T1 → T2 → G2` through the legs and `f : T1 → T2`.
fn backed(leg1: &Leg, leg2: &Leg, f: &Equivalence, inv1: &FKInvariant, inv2: &FKInvariant) -> Result<FKIso> {
    let (t1, t2) = (&leg1.cur, &leg2.cur);
    let cp = condensation(t1);
    let labels = f.source.row_comp();
    let map: Vec<usize> = (0..cp.len())
        .map(|c| labels.iter().position(|&l| l == c).map(|v| cp.component_of(v)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidCertificate("a component has no vertex".into()))?;
    let g = transport(f, cp.poset(), &map, t1.len())?;
    let (inv_t1, inv_t2) = (fk_invariant(t1)?, fk_invariant(t2)?);
    let mid = induced_iso(&g, &inv_t1, &inv_t2)?;
    let missing = || Error::Precondition("no invariant after standardization".into());
    let i1 = leg1.certificate()?.induced_iso()?.ok_or_else(missing)?;
    let i2 = leg2.certificate()?.induced_iso()?.ok_or_else(missing)?;
    let iso = i1.then(&mid, inv1, &inv_t1)?.then(&i2.inverse(inv2, &inv_t2)?, inv1, &inv_t2)?;
    iso.check(inv1, inv2).map_err(|e| Error::InvalidCertificate(format!("composite isomorphism: {e}")))?;
    Ok(iso)
}

/// Replays a certificate chain and recomputes its FK isomorphism.
pub fn check_chain(g1: &Graph, g2: &Graph, chain: &[MoveCertificate]) -> Result<FKIso> {
    let inv1 = fk_invariant(g1)?;
    let inv2 = fk_invariant(g2)?;
    if chain.is_empty() {
        if g1 != g2 {
            return Err(Error::InvalidCertificate("empty chain between different graphs".into()));
        }
        return Ok(FKIso::identity(&inv1));
    }
    let [c1, c2] = chain else {
        return Err(Error::InvalidCertificate("a chain has two legs".into()));
    };
    if c1.source != *g1 || c2.source != *g2 || c1.target != c2.target {
        return Err(Error::InvalidCertificate("legs do not connect the two graphs".into()));
    }
    check_certificate(c1)?;
    check_certificate(c2)?;
    let inv_m = fk_invariant(&c1.target)?;
    let i1 = c1.induced_iso()?.ok_or_else(|| Error::Precondition("no invariant at the meeting graph".into()))?;
    let i2 = c2.induced_iso()?.ok_or_else(|| Error::Precondition("no invariant at the meeting graph".into()))?;
    let iso = i1.then(&i2.inverse(&inv2, &inv_m)?, &inv1, &inv_m)?;
    iso.check(&inv1, &inv2).map_err(|e| Error::InvalidCertificate(format!("composite isomorphism: {e}")))?;
    Ok(iso)
}
