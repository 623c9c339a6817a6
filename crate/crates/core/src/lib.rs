//! Reduced filtered K-theory of finite directed graphs, certified graph
//! moves, and lifting of K-theory isomorphisms to GL_P/SL_P-equivalences.

pub mod error;
pub mod fk;
pub mod graphcore;
pub mod intlin;
pub mod lift;
pub mod moves;
pub mod posetblock;
pub mod random;

pub use error::{Error, Result};
