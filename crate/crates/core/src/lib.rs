//! Geometrically nonlinear analysis of planar frames with co-rotational beam
//! elements, plus a parametric Fin-Ray finger generator and design sweeps.

pub mod assembly;
pub mod corotational;
pub mod error;
pub mod finray;
pub mod io;
pub mod model;
pub mod solver;
pub mod sweep;

pub use assembly::{ElementState, ElementStateSet, GlobalMatrix, GlobalVector};
pub use error::{FinRayError, MechanicsError, ModelError, SolverError};
pub use finray::{Connection, FinRayModel, FinRayParams};
pub use model::{
    build_structure, Dof, Element, ElementKind, ElementProps, ElementSpec, Fixity, LoadCase, Node,
    Structure, SupportSet,
};
pub use solver::{probe_max_force, solve, SolveResult, SolveStatus, SolverConfig};
