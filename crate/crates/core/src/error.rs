use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate node id {0}")]
    DuplicateNode(usize),
    #[error("element {element} references missing node {node}")]
    DanglingElement { element: usize, node: usize },
    #[error("element connectivity graph is disconnected")]
    Disconnected,
    #[error("no translational degree of freedom is constrained")]
    UnconstrainedStructure,
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("node {0} has a non-finite coordinate")]
    NonFiniteCoordinate(usize),
    #[error("element {element}: {reason}")]
    InvalidElement { element: usize, reason: String },
    #[error("load vector has length {actual}, expected {expected}")]
    LoadLength { expected: usize, actual: usize },
    #[error("load entry {0} is not finite")]
    NonFiniteLoad(usize),
    #[error("load applied at constrained dof {0}")]
    LoadOnConstrainedDof(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MechanicsError {
    #[error("element {element} degenerated to zero length")]
    DegenerateElement { element: usize },
    #[error("singular tangent matrix (pivot {pivot:e} at row {row})")]
    SingularMatrix { row: usize, pivot: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("load vector does not match the structure: {0}")]
    Load(#[from] ModelError),
    #[error("bracket invalid: {0}")]
    BracketInvalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinRayError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),
    #[error("unknown contact node rank {rank} (finger has {available})")]
    UnknownContactNode { rank: usize, available: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}
