//! Finite-field Furstenberg sets: exact constructions, exhaustive
//! verification, Loomis-Whitney refinement certificates, and an incidence
//! pipeline that replays the projective-transform argument at small scale.

pub mod constructions;
pub mod error;
pub mod exact;
pub mod ff;
pub mod geometry;
pub mod incidence;
pub mod io;
pub(crate) mod linalg;
pub mod lw;
mod par;

pub use error::{Error, Result};
pub use ff::{Field, FieldElem};
pub use geometry::{Direction, Line, Point, ProjectiveMap};
pub use par::set_jobs;
