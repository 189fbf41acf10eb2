//! Finite-field toolkit for restricted rank-metric codes.

pub mod ambient;
pub mod codes;
pub mod equiv;
pub mod error;
pub mod field;
pub mod io;
pub mod linpoly;
pub mod matrix;
pub mod subspace;
pub mod suite;
pub mod verify;

pub use ambient::{Ambient, AmbientSpec};
pub use codes::{Code, Family, Kind, Params};
pub use equiv::{EquivMap, MapMode};
pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use linpoly::{GramMatrix, LinPoly, Setting};
pub use matrix::Matrix;
pub use subspace::{Relation, Subspace};
