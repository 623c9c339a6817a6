use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Zero};

use super::matrix::{Int, IntMatrix};
use super::snf::{kernel_basis, LinearSolver, SmithDecomposition};
use crate::error::{dim, Error, Result};

/// Finitely generated abelian group `Z^gens / (column span of relations)`.
#[derive(Clone, Debug)]
pub struct FinAbPresentation {
    labels: Vec<String>,
    relations: IntMatrix,
    solver: LinearSolver,
    invariant_factors: Vec<Int>,
}

impl PartialEq for FinAbPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.relations == other.relations
    }
}

impl FinAbPresentation {
    pub fn new(labels: Vec<String>, relations: IntMatrix) -> Result<Self> {
        if labels.len() != relations.rows() {
            return Err(dim(format!("{} labels for {} generators", labels.len(), relations.rows())));
        }
        let solver = LinearSolver::new(&relations);
        let snf = solver.snf();
        let rank = snf.rank();
        let mut invariant_factors: Vec<Int> =
            snf.diagonal().into_iter().take(rank).filter(|d| !d.is_one()).collect();
        invariant_factors.extend(std::iter::repeat_n(Int::zero(), relations.rows() - rank));
        Ok(FinAbPresentation { labels, relations, solver, invariant_factors })
    }

    pub fn unlabeled(relations: IntMatrix) -> Self {
        let labels = (0..relations.rows()).map(|i| format!("e{i}")).collect();
        Self::new(labels, relations).expect("label count matches by construction")
    }

    /// Free abelian group of the given rank.
    pub fn free(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self::new(labels, IntMatrix::zeros(n, 0)).expect("label count matches by construction")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn snf(&self) -> &SmithDecomposition {
        self.solver.snf()
    }

    /// Nonunit invariant factors in increasing order, then one 0 per free summand.
    pub fn invariant_factors(&self) -> &[Int] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.invariant_factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<Int> {
        self.invariant_factors.iter().filter(|d| !d.is_zero()).cloned().collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_isomorphic_to(&self, other: &FinAbPresentation) -> bool {
        self.invariant_factors == other.invariant_factors
    }

    /// Per SNF row modulus: `1` for killed rows, `d` for torsion rows, `0` for free rows.
    pub fn moduli(&self) -> Vec<Int> {
        let snf = self.snf();
        let rank = snf.rank();
        (0..self.generators())
            .map(|i| if i < rank { snf.d[(i, i)].clone() } else { Int::zero() })
            .collect()
    }

    /// Canonical coordinates of the class of `x`: two vectors define the
    /// same element exactly when their canonical coordinates agree.
    pub fn canonical(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(x.len(), self.generators(), "element has wrong length");
        let snf = self.snf();
        let rank = snf.rank();
        let mut y = snf.p.mul_vec(x);
        for (i, v) in y.iter_mut().enumerate().take(rank) {
            *v = v.mod_floor(&snf.d[(i, i)]);
        }
        y
    }

    /// Coordinates on the nontrivial SNF summands only (torsion first, then free).
    pub fn snf_coordinates(&self, x: &[Int]) -> Vec<Int> {
        let c = self.canonical(x);
        let moduli = self.moduli();
        c.into_iter().zip(moduli).filter(|(_, m)| !m.is_one()).map(|(v, _)| v).collect()
    }

    /// Generators of the nontrivial SNF summands expressed in the original generators.
    pub fn snf_generators(&self) -> Vec<Vec<Int>> {
        let pinv = self.snf().p.inverse_unimodular().expect("SNF transform is unimodular");
        let moduli = self.moduli();
        (0..self.generators()).filter(|&i| !moduli[i].is_one()).map(|i| pinv.col(i)).collect()
    }

    pub fn is_zero(&self, x: &[Int]) -> bool {
        self.canonical(x).iter().all(Zero::is_zero)
    }

    pub fn equal(&self, x: &[Int], y: &[Int]) -> bool {
        let d: Vec<Int> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero(&d)
    }

    /// The quotient by the subgroup generated by the columns of `extra`.
    pub fn quotient(&self, extra: &IntMatrix) -> FinAbPresentation {
        FinAbPresentation::new(self.labels.clone(), self.relations.hstack(extra))
            .expect("labels unchanged")
    }

    /// Columns generate the lattice of vectors in `Z^gens` whose class maps to zero under `m`.
    fn preimage_of_zero(m: &IntMatrix, codomain: &FinAbPresentation) -> IntMatrix {
        let k = kernel_basis(&m.hstack(codomain.relations()));
        let rows: Vec<usize> = (0..m.cols()).collect();
        k.select_rows(&rows)
    }
}

/// Homomorphism between presented groups, given on generator coordinates.
#[derive(Clone, Debug)]
pub struct GroupHom {
    domain: Arc<FinAbPresentation>,
    codomain: Arc<FinAbPresentation>,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(
        domain: Arc<FinAbPresentation>,
        codomain: Arc<FinAbPresentation>,
        matrix: IntMatrix,
    ) -> Result<Self> {
        if matrix.rows() != codomain.generators() || matrix.cols() != domain.generators() {
            return Err(dim(format!(
                "{}x{} matrix for a map from {} to {} generators",
                matrix.rows(),
                matrix.cols(),
                domain.generators(),
                codomain.generators()
            )));
        }
        let image = &matrix * domain.relations();
        for j in 0..image.cols() {
            if !codomain.is_zero(&image.col(j)) {
                return Err(Error::NotWellDefined(format!("relation {j} is not sent to zero")));
            }
        }
        Ok(GroupHom { domain, codomain, matrix })
    }

    pub fn identity(group: Arc<FinAbPresentation>) -> Self {
        let n = group.generators();
        GroupHom { domain: group.clone(), codomain: group, matrix: IntMatrix::identity(n) }
    }

    pub fn zero(domain: Arc<FinAbPresentation>, codomain: Arc<FinAbPresentation>) -> Self {
        let matrix = IntMatrix::zeros(codomain.generators(), domain.generators());
        GroupHom { domain, codomain, matrix }
    }

    pub fn domain(&self) -> &Arc<FinAbPresentation> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FinAbPresentation> {
        &self.codomain
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        self.matrix.mul_vec(x)
    }

    /// `next ∘ self`
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom> {
        if self.codomain.generators() != next.domain.generators() {
            return Err(dim("composing maps with mismatched middle group"));
        }
        GroupHom::new(self.domain.clone(), next.codomain.clone(), &next.matrix * &self.matrix)
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.matrix.cols()).all(|j| self.codomain.is_zero(&self.matrix.col(j)))
    }

    /// Equality as maps of groups (not of matrices).
    pub fn same_map(&self, other: &GroupHom) -> bool {
        if self.matrix.rows() != other.matrix.rows() || self.matrix.cols() != other.matrix.cols() {
            return false;
        }
        let diff = &self.matrix - &other.matrix;
        (0..diff.cols()).all(|j| self.codomain.is_zero(&diff.col(j)))
    }

    /// Generators (as columns) of the kernel lattice pulled back to `Z^gens`.
    pub fn kernel_lattice(&self) -> IntMatrix {
        FinAbPresentation::preimage_of_zero(&self.matrix, &self.codomain)
    }

    pub fn is_injective(&self) -> bool {
        let k = self.kernel_lattice();
        (0..k.cols()).all(|j| self.domain.is_zero(&k.col(j)))
    }

    pub fn is_surjective(&self) -> bool {
        self.codomain.quotient(&self.matrix).is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }

    /// Whether `x` lies in the image of this map.
    pub fn image_contains(&self, x: &[Int]) -> bool {
        self.codomain.quotient(&self.matrix).is_zero(x)
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_isomorphism() {
            return Err(Error::NotWellDefined("inverse of a non-isomorphism".into()));
        }
        let solver = LinearSolver::new(&self.matrix.hstack(self.codomain.relations()));
        let n = self.codomain.generators();
        let g = self.domain.generators();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Int::zero(); n];
            e[j] = Int::one();
            let x = solver.particular(&e)?.expect("surjective map has preimages");
            cols.push(x[..g].to_vec());
        }
        GroupHom::new(self.codomain.clone(), self.domain.clone(), IntMatrix::from_columns(g, &cols))
    }
}

/// Exactness of `a --f--> b --g--> c` at `b`.
pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> bool {
    if f.codomain.generators() != g.domain.generators() {
        return false;
    }
    match f.then(g) {
        Ok(c) if c.is_zero_map() => {}
        _ => return false,
    }
    let k = g.kernel_lattice();
    (0..k.cols()).all(|j| f.image_contains(&k.col(j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int;

    fn cyc(n: i64) -> Arc<FinAbPresentation> {
        Arc::new(FinAbPresentation::unlabeled(IntMatrix::from_rows(&[[n]])))
    }

    #[test]
    fn cokernel_examples() {
        assert!(FinAbPresentation::unlabeled(IntMatrix::from_rows(&[[1]])).is_trivial());
        assert_eq!(FinAbPresentation::unlabeled(IntMatrix::from_rows(&[[2]])).invariant_factors(), &[int(2)]);
        let g = FinAbPresentation::unlabeled(IntMatrix::from_rows(&[[2, 1], [0, 2]]));
        assert_eq!(g.invariant_factors(), &[int(4)]);
        let z = FinAbPresentation::unlabeled(IntMatrix::zeros(2, 0));
        assert_eq!(z.invariant_factors(), &[int(0), int(0)]);
    }

    #[test]
    fn hom_checks() {
        let z4 = cyc(4);
        let z2 = cyc(2);
        assert!(GroupHom::new(z4.clone(), z2.clone(), IntMatrix::from_rows(&[[1]])).is_ok());
        assert!(GroupHom::new(z2.clone(), z4.clone(), IntMatrix::from_rows(&[[1]])).is_err());
        let incl = GroupHom::new(z2.clone(), z4.clone(), IntMatrix::from_rows(&[[2]])).unwrap();
        let proj = GroupHom::new(z4.clone(), z2.clone(), IntMatrix::from_rows(&[[1]])).unwrap();
        assert!(incl.is_injective() && !incl.is_surjective());
        assert!(proj.is_surjective() && !proj.is_injective());
        assert!(is_exact_at(&incl, &proj));
        let three = GroupHom::new(z4.clone(), z4.clone(), IntMatrix::from_rows(&[[3]])).unwrap();
        assert!(three.is_isomorphism());
        let inv = three.inverse().unwrap();
        assert!(three.then(&inv).unwrap().same_map(&GroupHom::identity(z4)));
    }
}
