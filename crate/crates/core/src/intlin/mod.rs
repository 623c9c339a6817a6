//! Exact integer linear algebra: Smith normal form with transforms, kernels,
//! cokernel presentations and linear Diophantine solving.

mod group;
mod json;
mod matrix;
mod snf;

pub use group::{is_exact_at, FinAbPresentation, GroupHom};
pub use json::{int_from_json, int_to_json, ints_from_json, ints_to_json};
pub use matrix::{gcd_entries, int, Int, IntMatrix};
pub use snf::{kernel_basis, smith_normal_form, solve_linear, LinearSolver, SmithDecomposition, Solution};

/// Cokernel `Z^rows / im(a)` of `a`.
pub fn cokernel(a: &IntMatrix) -> FinAbPresentation {
    FinAbPresentation::unlabeled(a.clone())
}
