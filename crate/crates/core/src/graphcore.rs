//! Finite directed multigraphs, their B-matrices, the component poset and
//! hereditary saturated vertex sets.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::intlin::{int_from_json, int_to_json, FinAbPresentation, Int, IntMatrix};

/// Finite directed multigraph over an ordered vertex list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    adjacency: IntMatrix,
    singular: Vec<bool>,
}

impl Graph {
    pub fn new(vertices: Vec<String>, adjacency: IntMatrix) -> Result<Self> {
        let n = vertices.len();
        if adjacency.rows() != n || adjacency.cols() != n {
            return Err(Error::Parse(format!(
                "adjacency is {}x{} for {n} vertices",
                adjacency.rows(),
                adjacency.cols()
            )));
        }
        let mut seen = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if let Some(j) = seen.insert(v.as_str(), i) {
                return Err(Error::Parse(format!("vertex `{v}` listed twice (positions {j} and {i})")));
            }
        }
        if adjacency.entries().iter().any(Signed::is_negative) {
            return Err(Error::Parse("negative edge multiplicity".into()));
        }
        let singular = (0..n).map(|i| adjacency.row(i).iter().all(Zero::is_zero)).collect();
        Ok(Graph { vertices, adjacency, singular })
    }

    pub fn from_edges<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, u64)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut a = IntMatrix::zeros(names.len(), names.len());
        for (s, t, m) in edges {
            let si = *index.get(s.as_ref()).ok_or_else(|| Error::UnknownVertex(s.as_ref().into()))?;
            let ti = *index.get(t.as_ref()).ok_or_else(|| Error::UnknownVertex(t.as_ref().into()))?;
            a[(si, ti)] += Int::from(*m);
        }
        Graph::new(names, a)
    }

    /// One vertex carrying `loops` loops.
    pub fn bouquet(loops: u64) -> Self {
        Graph::from_edges(&["v"], &[("v", "v", loops)]).expect("valid literal graph")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.vertices.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVertex(name.into()))
    }

    pub fn adjacency(&self) -> &IntMatrix {
        &self.adjacency
    }

    pub fn edges(&self, u: usize, v: usize) -> &Int {
        &self.adjacency[(u, v)]
    }

    pub fn out_degree(&self, u: usize) -> Int {
        self.adjacency.row(u).iter().sum()
    }

    pub fn in_degree(&self, v: usize) -> Int {
        (0..self.len()).map(|u| self.adjacency[(u, v)].clone()).sum()
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.out_degree(v).is_zero()
    }

    pub fn is_source(&self, v: usize) -> bool {
        self.in_degree(v).is_zero()
    }

    /// Finite out-degree at least one; every vertex of a finite graph that is not a sink.
    pub fn is_regular(&self, v: usize) -> bool {
        !self.singular[v]
    }

    pub fn singular_flags(&self) -> &[bool] {
        &self.singular
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_sink(v)).collect()
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_source(v)).collect()
    }

    /// No zero row and no zero column.
    pub fn is_nondegenerate(&self) -> bool {
        self.sinks().is_empty() && self.sources().is_empty()
    }

    pub fn b_matrix(&self) -> IntMatrix {
        b_matrix(self)
    }

    pub fn b_bullet(&self) -> IntMatrix {
        b_bullet(self)
    }

    /// Graph whose B-matrix is `b`; fails if `b + I` has a negative entry.
    pub fn from_b_matrix(vertices: Vec<String>, b: &IntMatrix) -> Result<Self> {
        let a = b + &IntMatrix::identity(b.rows());
        Graph::new(vertices, a)
    }

    /// Same graph with vertices listed in the order `perm` (new position i holds old vertex perm[i]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let vertices = perm.iter().map(|&i| self.vertices[i].clone()).collect();
        let a = self.adjacency.submatrix(perm, perm);
        Graph::new(vertices, a).expect("permutation of a valid graph")
    }

    /// Fresh vertex name derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.vertices.iter().any(|v| v == base) {
            return base.to_string();
        }
        (1..).map(|k| format!("{base}.{k}")).find(|c| !self.vertices.contains(c)).expect("names are unbounded")
    }
}

pub fn b_matrix(g: &Graph) -> IntMatrix {
    &g.adjacency - &IntMatrix::identity(g.len())
}

/// B-matrix with the rows of singular vertices removed.
pub fn b_bullet(g: &Graph) -> IntMatrix {
    let keep: Vec<usize> = (0..g.len()).filter(|&v| g.is_regular(v)).collect();
    b_matrix(g).select_rows(&keep)
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut edges = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                let m = &self.adjacency[(i, j)];
                if !m.is_zero() {
                    edges.push(Value::Array(vec![
                        Value::String(self.vertices[i].clone()),
                        Value::String(self.vertices[j].clone()),
                        int_to_json(m),
                    ]));
                }
            }
        }
        let mut map = serde_json::Map::new();
        map.insert("vertices".into(), Value::Array(self.vertices.iter().cloned().map(Value::String).collect()));
        map.insert("edges".into(), Value::Array(edges));
        Value::Object(map).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        graph_from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn multiplicity(v: &Value) -> Result<Int> {
    if let Value::String(s) = v {
        let t = s.trim().to_ascii_lowercase();
        if t.starts_with("inf") || t == "∞" {
            return Err(Error::Parse("infinite edge multiplicities are not supported".into()));
        }
    }
    let m = int_from_json(v).map_err(Error::Parse)?;
    if m.is_negative() {
        return Err(Error::Parse(format!("negative edge multiplicity {m}")));
    }
    Ok(m)
}

pub fn graph_from_json(v: &Value) -> Result<Graph> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("graph must be a JSON object".into()))?;
    let names: Option<Vec<String>> = match obj.get("vertices") {
        Some(Value::Array(items)) => Some(
            items
                .iter()
                .map(|x| match x {
                    Value::String(s) => Ok(s.clone()),
                    Value::Number(n) => Ok(n.to_string()),
                    other => Err(Error::Parse(format!("bad vertex identifier {other}"))),
                })
                .collect::<Result<_>>()?,
        ),
        Some(other) => return Err(Error::Parse(format!("`vertices` must be an array, found {other}"))),
        None => None,
    };
    if let Some(adj) = obj.get("adjacency") {
        if obj.contains_key("edges") {
            return Err(Error::Parse("give either `edges` or `adjacency`, not both".into()));
        }
        let raw = adj.as_object().ok_or_else(|| Error::Parse("`adjacency` must be a matrix object".into()))?;
        let mut raw = raw.clone();
        if let Some(Value::Array(rows)) = raw.get("entries") {
            for row in rows {
                for x in row.as_array().into_iter().flatten() {
                    multiplicity(x)?;
                }
            }
        }
        let m: IntMatrix =
            serde_json::from_value(Value::Object(std::mem::take(&mut raw))).map_err(|e| Error::Parse(format!("adjacency: {e}")))?;
        let names = names.unwrap_or_else(|| (0..m.rows()).map(|i| i.to_string()).collect());
        return Graph::new(names, m);
    }
    let names = names.ok_or_else(|| Error::Parse("graph needs `vertices`".into()))?;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut a = IntMatrix::zeros(names.len(), names.len());
    let edges = match obj.get("edges") {
        Some(Value::Array(e)) => e.as_slice(),
        Some(other) => return Err(Error::Parse(format!("`edges` must be an array, found {other}"))),
        None => &[],
    };
    for e in edges {
        let parts = e.as_array().ok_or_else(|| Error::Parse(format!("bad edge {e}")))?;
        if parts.len() < 2 || parts.len() > 3 {
            return Err(Error::Parse(format!("edge must be [source, target, multiplicity], found {e}")));
        }
        let name = |x: &Value| -> Result<usize> {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => return Err(Error::Parse(format!("bad vertex identifier {other}"))),
            };
            index.get(s.as_str()).copied().ok_or(Error::UnknownVertex(s))
        };
        let (s, t) = (name(&parts[0])?, name(&parts[1])?);
        let m = match parts.get(2) {
            Some(x) => multiplicity(x)?,
            None => Int::one(),
        };
        a[(s, t)] += m;
    }
    Graph::new(names, a)
}

/// Set of components, as a bitmask over component indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompSet(pub u128);

impl CompSet {
    pub const MAX: usize = 128;

    pub fn empty() -> Self {
        CompSet(0)
    }

    pub fn singleton(i: usize) -> Self {
        CompSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < Self::MAX && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn without(mut self, i: usize) -> Self {
        self.remove(i);
        self
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: CompSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: CompSet) -> Self {
        CompSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..Self::MAX).filter(move |&i| self.contains(i))
    }

    pub fn map(self, f: impl Fn(usize) -> usize) -> Self {
        let mut out = CompSet::empty();
        for i in self.iter() {
            out.insert(f(i));
        }
        out
    }
}

/// Partial order on `0..len`, stored as a dense relation; `leq(i, j)` means `i ⪯ j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poset {
    leq: Vec<Vec<bool>>,
}

impl Poset {
    pub fn from_relation(leq: Vec<Vec<bool>>) -> Self {
        Poset { leq }
    }

    /// Reflexive-transitive closure of the given pairs `(i, j)` meaning `i ⪯ j`.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::Parse(format!("order pair ({i}, {j}) out of range")));
            }
            leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        let p = Poset { leq };
        if !p.is_partial_order() {
            return Err(Error::Parse("order pairs contain a cycle".into()));
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// `i ⋖ j`: `i < j` with nothing strictly between.
    pub fn covers(&self, i: usize, j: usize) -> bool {
        self.lt(i, j) && !(0..self.len()).any(|k| self.lt(i, k) && self.lt(k, j))
    }

    pub fn down(&self, p: usize) -> CompSet {
        let mut s = CompSet::empty();
        for i in 0..self.len() {
            if self.leq[i][p] {
                s.insert(i);
            }
        }
        s
    }

    pub fn is_down_set(&self, s: CompSet) -> bool {
        s.iter().all(|p| self.down(p).is_subset(s))
    }

    pub fn all(&self) -> CompSet {
        let mut s = CompSet::empty();
        for i in 0..self.len() {
            s.insert(i);
        }
        s
    }

    pub fn is_partial_order(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| self.leq[i][i])
            && (0..n).all(|i| (0..n).all(|j| i == j || !(self.leq[i][j] && self.leq[j][i])))
            && (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| !(self.leq[i][j] && self.leq[j][k]) || self.leq[i][k])))
    }

    /// Strict pairs `(i, j)` with `i ≺ j`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether `rho` (a permutation) maps this order onto `other`.
    pub fn is_isomorphism(&self, other: &Poset, rho: &[usize]) -> bool {
        let n = self.len();
        if other.len() != n || rho.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &r in rho {
            if r >= n || std::mem::replace(&mut seen[r], true) {
                return false;
            }
        }
        (0..n).all(|i| (0..n).all(|j| self.leq[i][j] == other.leq[rho[i]][rho[j]]))
    }

    /// All down-sets, in a fixed order (empty set first). Assumes indices form a linear extension.
    pub fn down_sets(&self) -> Vec<CompSet> {
        let n = self.len();
        let mut out = Vec::new();
        fn rec(p: &Poset, c: usize, cur: CompSet, out: &mut Vec<CompSet>) {
            if c == p.len() {
                out.push(cur);
                return;
            }
            rec(p, c + 1, cur, out);
            if p.down(c).without(c).is_subset(cur) {
                let mut next = cur;
                next.insert(c);
                rec(p, c + 1, next, out);
            }
        }
        let ext_ok = (0..n).all(|i| (0..n).all(|j| !self.lt(i, j) || i < j));
        assert!(ext_ok, "down_sets requires indices in a linear extension");
        rec(self, 0, CompSet::empty(), &mut out);
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// Single vertex without a loop.
    Trivial,
    /// A single simple cycle.
    Cyclic,
    Proper,
}

/// Strongly connected components with the reachability order; `i ⪯ j` iff
/// component `i` is reachable from component `j`. Component indices follow a
/// linear extension (minimal components first, ties by smallest vertex index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPoset {
    components: Vec<Vec<usize>>,
    poset: Poset,
    kinds: Vec<ComponentKind>,
    vertex_component: Vec<usize>,
}

impl ComponentPoset {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn kinds(&self) -> &[ComponentKind] {
        &self.kinds
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.vertex_component[v]
    }

    pub fn vertex_components(&self) -> &[usize] {
        &self.vertex_component
    }

    /// Vertices of the given components, in vertex order.
    pub fn vertices_of(&self, s: CompSet) -> Vec<usize> {
        (0..self.vertex_component.len()).filter(|&v| s.contains(self.vertex_component[v])).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }
}

/// Reachability closure: `reach[u][v]` iff there is a path (possibly empty) from u to v.
fn reachability(a: &IntMatrix) -> Vec<Vec<bool>> {
    let n = a.rows();
    let mut reach = vec![vec![false; n]; n];
    for s in 0..n {
        let mut stack = vec![s];
        reach[s][s] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if !a[(u, v)].is_zero() && !reach[s][v] {
                    reach[s][v] = true;
                    stack.push(v);
                }
            }
        }
    }
    reach
}

pub fn condensation(g: &Graph) -> ComponentPoset {
    let n = g.len();
    let a = g.adjacency();
    let reach = reachability(a);
    let mut raw: Vec<Vec<usize>> = Vec::new();
    let mut raw_of = vec![usize::MAX; n];
    for v in 0..n {
        if raw_of[v] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (v..n).filter(|&w| reach[v][w] && reach[w][v]).collect();
        for &w in &members {
            raw_of[w] = raw.len();
        }
        raw.push(members);
    }
    let k = raw.len();
    // raw component x is below y iff x is reachable from y
    let below = |x: usize, y: usize| reach[raw[y][0]][raw[x][0]];
    let mut order = Vec::with_capacity(k);
    let mut placed = vec![false; k];
    while order.len() < k {
        let next = (0..k)
            .filter(|&x| !placed[x] && (0..k).all(|y| y == x || placed[y] || !below(y, x)))
            .min_by_key(|&x| raw[x][0])
            .expect("condensation is acyclic");
        placed[next] = true;
        order.push(next);
    }
    let mut new_index = vec![0; k];
    for (i, &x) in order.iter().enumerate() {
        new_index[x] = i;
    }
    let components: Vec<Vec<usize>> = order.iter().map(|&x| raw[x].clone()).collect();
    let vertex_component: Vec<usize> = raw_of.iter().map(|&x| new_index[x]).collect();
    let leq = (0..k)
        .map(|i| (0..k).map(|j| reach[components[j][0]][components[i][0]]).collect())
        .collect();
    let kinds = components
        .iter()
        .map(|c| {
            let mut internal = Int::zero();
            for &u in c {
                for &v in c {
                    internal += &a[(u, v)];
                }
            }
            let size = Int::from(c.len());
            if internal.is_zero() {
                ComponentKind::Trivial
            } else if internal == size {
                ComponentKind::Cyclic
            } else {
                ComponentKind::Proper
            }
        })
        .collect();
    ComponentPoset { components, poset: Poset { leq }, kinds, vertex_component }
}

/// Every nontrivial strongly connected component carries more internal edges than vertices.
pub fn satisfies_condition_k(g: &Graph) -> bool {
    condensation(g).kinds.iter().all(|k| *k != ComponentKind::Cyclic)
}

pub fn is_hereditary(g: &Graph, h: &[usize]) -> bool {
    let mut inside = vec![false; g.len()];
    for &v in h {
        inside[v] = true;
    }
    h.iter().all(|&u| (0..g.len()).all(|v| g.edges(u, v).is_zero() || inside[v]))
}

pub fn is_saturated(g: &Graph, h: &[usize]) -> bool {
    let mut inside = vec![false; g.len()];
    for &v in h {
        inside[v] = true;
    }
    (0..g.len()).all(|u| {
        inside[u] || !g.is_regular(u) || (0..g.len()).any(|v| !g.edges(u, v).is_zero() && !inside[v])
    })
}

/// All hereditary saturated vertex sets (each sorted), ordered by size then content.
pub fn hereditary_saturated_sets(g: &Graph) -> Vec<Vec<usize>> {
    let cp = condensation(g);
    let mut out: Vec<Vec<usize>> = cp
        .poset
        .down_sets()
        .into_iter()
        .map(|s| cp.vertices_of(s))
        .filter(|h| is_saturated(g, h))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// K0 of the graph as `cok(B•ᵀ)`, labeled by vertices, with the all-ones unit vector.
#[derive(Clone, Debug)]
pub struct UnitClass {
    pub group: Arc<FinAbPresentation>,
    pub coordinates: Vec<Int>,
}

impl UnitClass {
    pub fn snf_coordinates(&self) -> Vec<Int> {
        self.group.snf_coordinates(&self.coordinates)
    }
}

pub fn unit_class(g: &Graph) -> UnitClass {
    let group = FinAbPresentation::new(g.vertices().to_vec(), b_bullet(g).transpose())
        .expect("one label per vertex");
    UnitClass { group: Arc::new(group), coordinates: vec![Int::one(); g.len()] }
}

/// Number of edges per ordered vertex pair, as a map (handy for tests and diagnostics).
pub fn edge_map(g: &Graph) -> BTreeMap<(String, String), Int> {
    let mut m = BTreeMap::new();
    for i in 0..g.len() {
        for j in 0..g.len() {
            if !g.edges(i, j).is_zero() {
                m.insert((g.vertex(i).to_string(), g.vertex(j).to_string()), g.edges(i, j).clone());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int;

    fn ab() -> Graph {
        Graph::from_edges(&["a", "b"], &[("a", "a", 2), ("b", "b", 2), ("b", "a", 1)]).unwrap()
    }

    #[test]
    fn b_matrices() {
        assert_eq!(Graph::bouquet(2).b_matrix(), IntMatrix::from_rows(&[[1]]));
        assert_eq!(Graph::bouquet(1).b_matrix(), IntMatrix::from_rows(&[[0]]));
        assert_eq!(ab().b_matrix(), IntMatrix::from_rows(&[[1, 0], [1, 1]]));
        let sink = Graph::from_edges(&["a", "b"], &[("a", "b", 1)]).unwrap();
        assert_eq!(sink.b_bullet(), IntMatrix::from_rows(&[[-1, 1]]));
    }

    #[test]
    fn condensation_examples() {
        let cp = condensation(&Graph::bouquet(2));
        assert_eq!(cp.len(), 1);
        let cp = condensation(&ab());
        assert_eq!(cp.components(), &[vec![0], vec![1]]);
        assert!(cp.poset().lt(0, 1));
        // diamond: d -> b, d -> c, b -> a, c -> a, all with two loops
        let g = Graph::from_edges(
            &["a", "b", "c", "d"],
            &[
                ("a", "a", 2),
                ("b", "b", 2),
                ("c", "c", 2),
                ("d", "d", 2),
                ("d", "b", 1),
                ("d", "c", 1),
                ("b", "a", 1),
                ("c", "a", 1),
            ],
        )
        .unwrap();
        let p = condensation(&g).poset().clone();
        assert_eq!(p.strict_pairs().len(), 5);
        assert!(!p.leq(1, 2) && !p.leq(2, 1));
        assert!(p.covers(1, 3) && p.covers(0, 1) && !p.covers(0, 3));
    }

    #[test]
    fn condition_k_examples() {
        assert!(!satisfies_condition_k(&Graph::bouquet(1)));
        assert!(satisfies_condition_k(&Graph::bouquet(2)));
        let c3 = Graph::from_edges(&["x", "y", "z"], &[("x", "y", 1), ("y", "z", 1), ("z", "x", 1)]).unwrap();
        assert!(!satisfies_condition_k(&c3));
    }

    #[test]
    fn hereditary_saturated_examples() {
        assert_eq!(hereditary_saturated_sets(&Graph::bouquet(2)), vec![vec![], vec![0]]);
        assert_eq!(hereditary_saturated_sets(&ab()), vec![vec![], vec![0], vec![0, 1]]);
        let g = Graph::from_edges(&["a", "b"], &[("a", "a", 2), ("b", "b", 2)]).unwrap();
        assert_eq!(hereditary_saturated_sets(&g).len(), 4);
    }

    #[test]
    fn unit_class_examples() {
        assert!(unit_class(&Graph::bouquet(2)).group.is_trivial());
        let u = unit_class(&Graph::bouquet(3));
        assert_eq!(u.group.invariant_factors(), &[int(2)]);
        assert_eq!(u.snf_coordinates(), vec![int(1)]);
        assert!(unit_class(&ab()).group.is_trivial());
    }

    #[test]
    fn json_forms() {
        let g: Graph = serde_json::from_str(r#"{"vertices":["a","b"],"edges":[["a","a",2],["b","b",2],["b","a",1]]}"#)
            .unwrap();
        assert_eq!(g, ab());
        let h: Graph = serde_json::from_str(
            r#"{"vertices":["a","b"],"adjacency":{"rows":2,"cols":2,"entries":[[2,0],[1,2]]}}"#,
        )
        .unwrap();
        assert_eq!(h, ab());
        let back: Graph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Graph>(r#"{"vertices":["a"],"edges":[["a","a","inf"]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"vertices":["a"],"edges":[["a","b",1]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"vertices":["a","a"],"edges":[]}"#).is_err());
    }
}
