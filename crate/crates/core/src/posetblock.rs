//! Integer matrices with row and column coordinates labeled by the
//! components of a poset: membership in M_P and M_P^+, GL_P/SL_P, the
//! ι-embeddings, and equivalences `(U, V): B → B'` with `U·B·V = B'`.
//!
//! Entry `(r, c)` may be nonzero only when the component of column `c` lies
//! below the component of row `r`. Coordinates of a component need not be
//! contiguous; [`BlockMatrix::contiguous`] gives the sorted layout.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{dim, Error, Result};
use crate::graphcore::{condensation, CompSet, ComponentPoset, Graph, Poset};
use crate::intlin::{smith_normal_form, Int, IntMatrix};

/// Block sizes `n_i` per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(k: usize) -> Self {
        MultiIndex(vec![0; k])
    }

    pub fn unit(k: usize, j: usize, times: usize) -> Self {
        let mut v = vec![0; k];
        v[j] = times;
        MultiIndex(v)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Component label for each appended coordinate, in append order.
    pub fn labels(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(j, &r)| std::iter::repeat_n(j, r)).collect()
    }
}

fn counts(labels: &[usize], k: usize) -> Vec<usize> {
    let mut c = vec![0; k];
    for &l in labels {
        c[l] += 1;
    }
    c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub in_mp: bool,
    pub in_mp_plus: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    poset: Poset,
    row_comp: Vec<usize>,
    col_comp: Vec<usize>,
    matrix: IntMatrix,
}

impl BlockMatrix {
    pub fn new(poset: Poset, row_comp: Vec<usize>, col_comp: Vec<usize>, matrix: IntMatrix) -> Result<Self> {
        if row_comp.len() != matrix.rows() || col_comp.len() != matrix.cols() {
            return Err(dim(format!(
                "{} row and {} column labels for a {}x{} matrix",
                row_comp.len(),
                col_comp.len(),
                matrix.rows(),
                matrix.cols()
            )));
        }
        if let Some(&c) = row_comp.iter().chain(&col_comp).find(|&&c| c >= poset.len()) {
            return Err(dim(format!("component label {c} outside a poset of {} elements", poset.len())));
        }
        Ok(BlockMatrix { poset, row_comp, col_comp, matrix })
    }

    /// Rows and columns carry the same labels.
    pub fn square(poset: Poset, comp: Vec<usize>, matrix: IntMatrix) -> Result<Self> {
        Self::new(poset, comp.clone(), comp, matrix)
    }

    /// `B_g` (equal to `B_g^•` since sinks are rejected) over the condensation of `g`.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let cp = condensation(g);
        Self::from_graph_with(g, &cp)
    }

    pub fn from_graph_with(g: &Graph, cp: &ComponentPoset) -> Result<Self> {
        if !g.sinks().is_empty() {
            return Err(Error::Precondition(format!(
                "graph has a sink at `{}`; block matrices are built from sink-free graphs",
                g.vertex(g.sinks()[0])
            )));
        }
        Self::square(cp.poset().clone(), cp.vertex_components().to_vec(), g.b_matrix())
    }

    pub fn identity(poset: Poset, comp: Vec<usize>) -> Self {
        let n = comp.len();
        BlockMatrix { poset, row_comp: comp.clone(), col_comp: comp, matrix: IntMatrix::identity(n) }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn row_comp(&self) -> &[usize] {
        &self.row_comp
    }

    pub fn col_comp(&self) -> &[usize] {
        &self.col_comp
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn with_matrix(&self, matrix: IntMatrix) -> Result<Self> {
        Self::new(self.poset.clone(), self.row_comp.clone(), self.col_comp.clone(), matrix)
    }

    pub fn row_index(&self) -> MultiIndex {
        MultiIndex(counts(&self.row_comp, self.poset.len()))
    }

    pub fn col_index(&self) -> MultiIndex {
        MultiIndex(counts(&self.col_comp, self.poset.len()))
    }

    pub fn rows_in(&self, s: CompSet) -> Vec<usize> {
        (0..self.row_comp.len()).filter(|&r| s.contains(self.row_comp[r])).collect()
    }

    pub fn cols_in(&self, s: CompSet) -> Vec<usize> {
        (0..self.col_comp.len()).filter(|&c| s.contains(self.col_comp[c])).collect()
    }

    /// Block `{i, j}`: rows of component `i`, columns of component `j`.
    pub fn block(&self, i: usize, j: usize) -> IntMatrix {
        self.matrix.submatrix(&self.rows_in(CompSet::singleton(i)), &self.cols_in(CompSet::singleton(j)))
    }

    pub fn diagonal_block(&self, i: usize) -> IntMatrix {
        self.block(i, i)
    }

    /// Restriction to the rows and columns of the components in `s`.
    pub fn restrict(&self, s: CompSet) -> BlockMatrix {
        let rows = self.rows_in(s);
        let cols = self.cols_in(s);
        BlockMatrix {
            poset: self.poset.clone(),
            row_comp: rows.iter().map(|&r| self.row_comp[r]).collect(),
            col_comp: cols.iter().map(|&c| self.col_comp[c]).collect(),
            matrix: self.matrix.submatrix(&rows, &cols),
        }
    }

    pub fn allowed(&self, r: usize, c: usize) -> bool {
        self.poset.leq(self.col_comp[c], self.row_comp[r])
    }

    pub fn violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.matrix.rows() {
            for c in 0..self.matrix.cols() {
                if !self.matrix[(r, c)].is_zero() && !self.allowed(r, c) {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn in_mp(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn classify(&self) -> Classification {
        let in_mp = self.in_mp();
        let in_mp_plus = in_mp && self.mp_plus_failure().is_none();
        Classification { in_mp, in_mp_plus }
    }

    /// First reason the matrix is not in M_P^+ (ignoring M_P membership).
    pub fn mp_plus_failure(&self) -> Option<String> {
        if self.row_index() != self.col_index() {
            return Some("row and column multiindices differ".into());
        }
        for (i, &n) in self.row_index().0.iter().enumerate() {
            if n < 3 {
                return Some(format!("block {i} has size {n} < 3"));
            }
        }
        for r in 0..self.matrix.rows() {
            for c in 0..self.matrix.cols() {
                if self.allowed(r, c) && !self.matrix[(r, c)].is_positive() {
                    return Some(format!("allowed entry ({r}, {c}) is not positive"));
                }
            }
        }
        for i in 0..self.poset.len() {
            let s = smith_normal_form(&self.diagonal_block(i));
            let ones = s.diagonal().iter().filter(|d| d.is_one()).count();
            if ones < 2 {
                return Some(format!("Smith form of diagonal block {i} has {ones} unit entries"));
            }
        }
        None
    }

    /// Determinants of the diagonal blocks, in the stored coordinate order.
    pub fn diagonal_dets(&self) -> Result<Vec<Int>> {
        (0..self.poset.len())
            .map(|i| {
                let b = self.diagonal_block(i);
                if b.is_square() {
                    Ok(b.det())
                } else {
                    Err(dim(format!("diagonal block {i} is {}x{}", b.rows(), b.cols())))
                }
            })
            .collect()
    }

    pub fn is_glp(&self) -> bool {
        self.row_index() == self.col_index()
            && self.in_mp()
            && self.diagonal_dets().is_ok_and(|d| d.iter().all(|x| x.abs().is_one()))
    }

    pub fn is_slp(&self) -> bool {
        self.is_glp() && self.diagonal_dets().is_ok_and(|d| d.iter().all(One::is_one))
    }

    /// `ι_r`: appends `r_j` coordinates labeled `j` (in component order) with `+1` on the new diagonal.
    pub fn iota_embed(&self, r: &MultiIndex) -> BlockMatrix {
        self.append_diagonal(&r.labels(), &Int::one())
    }

    /// `−ι_r(−b)`: appends `−1` diagonal entries.
    pub fn neg_iota(&self, r: &MultiIndex) -> BlockMatrix {
        self.append_diagonal(&r.labels(), &-Int::one())
    }

    pub fn append_diagonal(&self, labels: &[usize], value: &Int) -> BlockMatrix {
        let extra = IntMatrix::diagonal(&vec![value.clone(); labels.len()]);
        let mut row_comp = self.row_comp.clone();
        row_comp.extend_from_slice(labels);
        let mut col_comp = self.col_comp.clone();
        col_comp.extend_from_slice(labels);
        BlockMatrix { poset: self.poset.clone(), row_comp, col_comp, matrix: self.matrix.direct_sum(&extra) }
    }

    /// Drops the last `k` rows and columns.
    pub fn truncate(&self, k: usize) -> BlockMatrix {
        let rows: Vec<usize> = (0..self.matrix.rows() - k).collect();
        let cols: Vec<usize> = (0..self.matrix.cols() - k).collect();
        BlockMatrix {
            poset: self.poset.clone(),
            row_comp: self.row_comp[..rows.len()].to_vec(),
            col_comp: self.col_comp[..cols.len()].to_vec(),
            matrix: self.matrix.submatrix(&rows, &cols),
        }
    }

    pub fn checked_mul(&self, other: &BlockMatrix) -> Result<BlockMatrix> {
        if self.poset != other.poset {
            return Err(dim("product of block matrices over different posets"));
        }
        if self.col_comp != other.row_comp {
            return Err(dim("column labels of the left factor differ from row labels of the right factor"));
        }
        Ok(BlockMatrix {
            poset: self.poset.clone(),
            row_comp: self.row_comp.clone(),
            col_comp: other.col_comp.clone(),
            matrix: self.matrix.checked_mul(&other.matrix)?,
        })
    }

    pub fn inverse(&self) -> Option<BlockMatrix> {
        let inv = self.matrix.inverse_unimodular()?;
        Some(BlockMatrix {
            poset: self.poset.clone(),
            row_comp: self.col_comp.clone(),
            col_comp: self.row_comp.clone(),
            matrix: inv,
        })
    }

    pub fn transpose_labels_equal(&self) -> bool {
        self.row_comp == self.col_comp
    }

    /// Rows reordered so that new row `i` is old row `perm[i]`; same for columns with `cperm`.
    pub fn permuted(&self, rperm: &[usize], cperm: &[usize]) -> BlockMatrix {
        BlockMatrix {
            poset: self.poset.clone(),
            row_comp: rperm.iter().map(|&r| self.row_comp[r]).collect(),
            col_comp: cperm.iter().map(|&c| self.col_comp[c]).collect(),
            matrix: self.matrix.submatrix(rperm, cperm),
        }
    }

    /// Stable sort of coordinates by component: ties keep their stored order.
    pub fn contiguous_order(labels: &[usize]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.sort_by_key(|&i| labels[i]);
        idx
    }

    pub fn contiguous(&self) -> BlockMatrix {
        self.permuted(&Self::contiguous_order(&self.row_comp), &Self::contiguous_order(&self.col_comp))
    }

    pub fn relabel(&self, poset: Poset, map: &[usize]) -> Result<BlockMatrix> {
        BlockMatrix::new(
            poset,
            self.row_comp.iter().map(|&c| map[c]).collect(),
            self.col_comp.iter().map(|&c| map[c]).collect(),
            self.matrix.clone(),
        )
    }
}

impl Serialize for BlockMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let k = self.poset.len();
        let groups = |labels: &[usize]| -> Vec<Vec<usize>> {
            (0..k).map(|j| (0..labels.len()).filter(|&x| labels[x] == j).collect()).collect()
        };
        let order: Vec<[usize; 2]> = self.poset.strict_pairs().into_iter().map(|(i, j)| [i, j]).collect();
        let mut v = json!({
            "matrix": self.matrix,
            "components": groups(&self.row_comp),
            "order": order,
        });
        if self.row_comp != self.col_comp {
            v["col_components"] = json!(groups(&self.col_comp));
        }
        v.serialize(serializer)
    }
}

fn parse_groups(v: &Value, n: usize, what: &str) -> Result<Vec<usize>> {
    let groups = v.as_array().ok_or_else(|| Error::Parse(format!("`{what}` must be an array of arrays")))?;
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    for (j, g) in groups.iter().enumerate() {
        let items = g.as_array().ok_or_else(|| Error::Parse(format!("`{what}[{j}]` must be an array")))?;
        for item in items {
            let pos = match item {
                Value::Number(x) => {
                    x.as_u64().ok_or_else(|| Error::Parse(format!("bad coordinate index {x}")))? as usize
                }
                Value::String(_) => {
                    next += 1;
                    next - 1
                }
                other => return Err(Error::Parse(format!("bad coordinate entry {other}"))),
            };
            if pos >= n || labels[pos] != usize::MAX {
                return Err(Error::Parse(format!("coordinate {pos} out of range or listed twice in `{what}`")));
            }
            labels[pos] = j;
        }
    }
    if labels.contains(&usize::MAX) {
        return Err(Error::Parse(format!("`{what}` does not cover all {n} coordinates")));
    }
    Ok(labels)
}

pub fn block_matrix_from_json(v: &Value) -> Result<BlockMatrix> {
    let matrix: IntMatrix = serde_json::from_value(v.get("matrix").cloned().unwrap_or(Value::Null))
        .map_err(|e| Error::Parse(format!("block matrix `matrix`: {e}")))?;
    let comps = v.get("components").ok_or_else(|| Error::Parse("block matrix needs `components`".into()))?;
    let k = comps.as_array().map_or(0, Vec::len);
    let row_comp = parse_groups(comps, matrix.rows(), "components")?;
    let col_comp = match v.get("col_components") {
        Some(c) => parse_groups(c, matrix.cols(), "col_components")?,
        None if matrix.rows() == matrix.cols() => row_comp.clone(),
        None => return Err(Error::Parse("non-square block matrix needs `col_components`".into())),
    };
    let mut pairs = Vec::new();
    for p in v.get("order").and_then(Value::as_array).into_iter().flatten() {
        let ij: Vec<usize> = p
            .as_array()
            .filter(|a| a.len() == 2)
            .and_then(|a| a.iter().map(|x| x.as_u64().map(|x| x as usize)).collect())
            .ok_or_else(|| Error::Parse(format!("order pair must be [i, j], found {p}")))?;
        pairs.push((ij[0], ij[1]));
    }
    let poset = Poset::from_pairs(k, &pairs)?;
    BlockMatrix::new(poset, row_comp, col_comp, matrix)
}

impl<'de> Deserialize<'de> for BlockMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        block_matrix_from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// `(U, V): source → target` with `U·source·V = target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub u: BlockMatrix,
    pub v: BlockMatrix,
    pub source: BlockMatrix,
    pub target: BlockMatrix,
}

impl Equivalence {
    pub fn identity(b: &BlockMatrix) -> Self {
        Equivalence {
            u: BlockMatrix::identity(b.poset.clone(), b.row_comp.clone()),
            v: BlockMatrix::identity(b.poset.clone(), b.col_comp.clone()),
            source: b.clone(),
            target: b.clone(),
        }
    }

    /// Builds `(U, V): source → (U·source·V)` from raw matrices, taking labels from `source`.
    pub fn from_matrices(source: &BlockMatrix, u: IntMatrix, v: IntMatrix) -> Result<Self> {
        let u = BlockMatrix::new(source.poset.clone(), source.row_comp.clone(), source.row_comp.clone(), u)?;
        let v = BlockMatrix::new(source.poset.clone(), source.col_comp.clone(), source.col_comp.clone(), v)?;
        let target = u.checked_mul(source)?.checked_mul(&v)?;
        Ok(Equivalence { u, v, source: source.clone(), target })
    }

    /// Why verification fails, or `None` when `(U, V)` is a GL_P (SL_P if requested) equivalence.
    pub fn check(&self, require_sl: bool) -> Option<String> {
        let p = &self.source.poset;
        if [&self.target.poset, &self.u.poset, &self.v.poset].iter().any(|q| *q != p) {
            return Some("block matrices over different posets".into());
        }
        if self.u.row_comp != self.target.row_comp || self.u.col_comp != self.source.row_comp {
            return Some("labels of U do not match target rows and source rows".into());
        }
        if self.v.row_comp != self.source.col_comp || self.v.col_comp != self.target.col_comp {
            return Some("labels of V do not match source columns and target columns".into());
        }
        if !self.source.in_mp() || !self.target.in_mp() {
            return Some("source or target violates the block structure".into());
        }
        for (name, m) in [("U", &self.u), ("V", &self.v)] {
            if !m.is_glp() {
                return Some(format!("{name} is not in GL_P"));
            }
            if require_sl && !m.is_slp() {
                return Some(format!("{name} is not in SL_P"));
            }
        }
        let prod = &(&self.u.matrix * &self.source.matrix) * &self.v.matrix;
        if prod != self.target.matrix {
            return Some("U·source·V differs from target".into());
        }
        None
    }

    pub fn verify(&self, require_sl: bool) -> bool {
        self.check(require_sl).is_none()
    }

    /// `e1` followed by `e2`: `(e2.u·e1.u, e1.v·e2.v): e1.source → e2.target`.
    pub fn compose(&self, next: &Equivalence) -> Result<Equivalence> {
        if self.target != next.source {
            return Err(Error::InvalidCertificate("middle matrices of the composition differ".into()));
        }
        Ok(Equivalence {
            u: next.u.checked_mul(&self.u)?,
            v: self.v.checked_mul(&next.v)?,
            source: self.source.clone(),
            target: next.target.clone(),
        })
    }

    pub fn inverse(&self) -> Result<Equivalence> {
        let u = self.u.inverse().ok_or_else(|| Error::InvalidCertificate("U is not invertible".into()))?;
        let v = self.v.inverse().ok_or_else(|| Error::InvalidCertificate("V is not invertible".into()))?;
        Ok(Equivalence { u, v, source: self.target.clone(), target: self.source.clone() })
    }

    /// Extends by `−1` padding coordinates on both sides (identity on U and V).
    pub fn pad(&self, labels: &[usize]) -> Equivalence {
        let one = Int::one();
        Equivalence {
            u: self.u.append_diagonal(labels, &one),
            v: self.v.append_diagonal(labels, &one),
            source: self.source.append_diagonal(labels, &-one.clone()),
            target: self.target.append_diagonal(labels, &-one),
        }
    }

    /// `(det U{i}, det V{i})` per component.
    pub fn det_signature(&self) -> Result<(Vec<Int>, Vec<Int>)> {
        Ok((self.u.diagonal_dets()?, self.v.diagonal_dets()?))
    }
}

pub fn verify_equivalence(e: &Equivalence, require_sl: bool) -> bool {
    e.verify(require_sl)
}

pub fn compose(e1: &Equivalence, e2: &Equivalence) -> Result<Equivalence> {
    e1.compose(e2)
}

pub fn iota_embed(b: &BlockMatrix, r: &MultiIndex) -> BlockMatrix {
    b.iota_embed(r)
}

pub fn classify(b: &BlockMatrix) -> Classification {
    b.classify()
}

pub fn is_glp(u: &BlockMatrix) -> bool {
    u.is_glp()
}

pub fn is_slp(u: &BlockMatrix) -> bool {
    u.is_slp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::{cokernel, int};

    fn chain2() -> Poset {
        Poset::from_pairs(2, &[(0, 1)]).unwrap()
    }

    fn single(m: IntMatrix) -> BlockMatrix {
        let n = m.rows();
        BlockMatrix::square(Poset::from_pairs(1, &[]).unwrap(), vec![0; n], m).unwrap()
    }

    #[test]
    fn classify_examples() {
        let anti = Poset::from_pairs(2, &[]).unwrap();
        let b = BlockMatrix::square(anti, vec![0, 1], IntMatrix::identity(2)).unwrap();
        assert_eq!(b.classify(), Classification { in_mp: true, in_mp_plus: false });
        let b = single(IntMatrix::from_rows(&[[2, 2, 2], [2, 2, 2], [2, 2, 2]]));
        assert_eq!(b.classify(), Classification { in_mp: true, in_mp_plus: false });
        let b = single(IntMatrix::from_rows(&[[2, 1, 1], [1, 2, 1], [1, 1, 2]]));
        assert_eq!(b.classify(), Classification { in_mp: true, in_mp_plus: true });
        let bad = BlockMatrix::square(chain2(), vec![0, 1], IntMatrix::from_rows(&[[1, 1], [0, 1]])).unwrap();
        assert!(!bad.in_mp());
    }

    #[test]
    fn glp_slp_examples() {
        let id = single(IntMatrix::identity(3));
        assert!(id.is_glp() && id.is_slp());
        let swap = single(IntMatrix::from_rows(&[[0, 1], [1, 0]]));
        assert!(swap.is_glp() && !swap.is_slp());
        let v0 = single(IntMatrix::from_rows(&[[1, 0, 0, 0], [0, 1, 0, 0], [-1, 0, 0, -1], [0, 0, -1, 0]]));
        assert_eq!(v0.matrix().det(), int(-1));
        assert!(v0.is_glp() && !v0.is_slp());
    }

    #[test]
    fn iota_examples() {
        let b = single(IntMatrix::from_rows(&[[1]]));
        let p = b.neg_iota(&MultiIndex(vec![4]));
        assert_eq!(p.matrix(), &IntMatrix::diagonal(&[int(1), int(-1), int(-1), int(-1), int(-1)]));
        assert_eq!(b.iota_embed(&MultiIndex(vec![0])), b);
        let b = single(IntMatrix::from_rows(&[[2, 1], [0, 2]]));
        let p = b.neg_iota(&MultiIndex(vec![3]));
        assert_eq!(
            cokernel(&p.matrix().transpose()).invariant_factors(),
            cokernel(&b.matrix().transpose()).invariant_factors()
        );
        assert_eq!(p.truncate(3), b);
    }

    #[test]
    fn equivalence_verify_and_compose() {
        let b = BlockMatrix::square(chain2(), vec![0, 1], IntMatrix::from_rows(&[[1, 0], [1, 1]])).unwrap();
        let id = Equivalence::identity(&b);
        assert!(id.verify(true));
        let w = IntMatrix::from_rows(&[[1, 0], [1, 1]]);
        let e = Equivalence::from_matrices(&b, w, IntMatrix::identity(2)).unwrap();
        assert!(e.verify(true));
        assert_eq!(e.compose(&Equivalence::identity(&e.target)).unwrap(), e);
        let back = e.inverse().unwrap();
        assert!(back.verify(true));
        assert_eq!(e.compose(&back).unwrap().target, b);
        let mut bad = e.clone();
        bad.u = bad.u.with_matrix(IntMatrix::from_rows(&[[1, 0], [2, 1]])).unwrap();
        assert!(!bad.verify(false));
    }

    #[test]
    fn json_round_trip() {
        let b = BlockMatrix::square(chain2(), vec![1, 0, 1], IntMatrix::from_rows(&[[1, 1, 0], [0, 2, 0], [1, 1, 1]]))
            .unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: BlockMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        let named: BlockMatrix = serde_json::from_str(
            r#"{"matrix":{"rows":2,"cols":2,"entries":[[1,0],[1,1]]},"components":[["a"],["b"]],"order":[[0,1]]}"#,
        )
        .unwrap();
        assert_eq!(named.row_comp(), &[0, 1]);
        assert!(named.in_mp());
    }
}
