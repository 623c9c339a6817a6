//! Lifting K-theory isomorphisms to GL_P-equivalences, and elementary
//! factorization of SL_P matrices.

mod descent;
mod factor;
mod poset;
mod single;

pub use factor::{factor_slp, positive_factor, transvections, Transvection};
pub use poset::{lift_poset, KWebIso};
pub use single::{is_allowable, lift_single, lift_single_seeded};

/// Three-valued result of a search: budget failure is never reported as absence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lift<T> {
    Found(T),
    /// Proven not to exist.
    Absent(String),
    Inconclusive(String),
}

impl<T> Lift<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Lift::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Lift::Found(_))
    }

    pub fn map<S>(self, f: impl FnOnce(T) -> S) -> Lift<S> {
        match self {
            Lift::Found(t) => Lift::Found(f(t)),
            Lift::Absent(s) => Lift::Absent(s),
            Lift::Inconclusive(s) => Lift::Inconclusive(s),
        }
    }
}

/// Default number of candidate lifts tried per search.
pub const DEFAULT_BUDGET: u64 = 400;
