//! Exact models of box-world (generalized non-signalling) systems.
//!
//! Everything is computed over arbitrary-precision rationals: effect
//! coefficients, state readouts, polytope vertices, and the linear maps that
//! act on them.  The crate builds the canonical effect basis of a system of
//! sites, enumerates extremal product effects and state-polytope vertices,
//! and constructs or exhaustively searches the group of reversible allowed
//! transformations.
//!
//! Module layout:
//! - [`rational`], [`linalg`] — exact scalars and dense rational linear algebra
//! - [`theory`] — sites, systems, the canonical effect basis, Gram data
//! - [`states`], [`cone`], [`vertices`] — states, probability tables, cone
//!   membership certificates, vertex enumeration
//! - [`transforms`], [`search`], [`verify`] — allowed maps, group generation,
//!   exhaustive search, verification reports
//! - [`bell`] — correlators and Bell functionals
//! - [`io`] — serialized forms shared by the CLI and the fuzz targets

pub mod bell;
pub mod cone;
mod error;
pub mod io;
pub mod linalg;
pub mod rational;
pub mod search;
pub mod states;
pub mod theory;
pub mod transforms;
pub mod verify;
pub mod vertices;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
