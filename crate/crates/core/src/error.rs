use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension must be at least 1 (got {0})")]
    InvalidDimension(usize),

    #[error("mode {mode} has direction outside 1..={dim}")]
    DirectionOutOfRange { mode: String, dim: usize },

    #[error("mode {0} is an annihilator in this space, expected a creator")]
    NotCreator(String),

    #[error("operator term is not normally ordered: {0}")]
    NotNormallyOrdered(String),

    #[error("unbounded basis request: generator {0} can appear to arbitrary power; give an x0 cap or a regularizing torus grading")]
    Unbounded(String),

    #[error("state is not homogeneous in conformal weight")]
    Inhomogeneous,

    #[error("BRST contract violated: {0}")]
    BrstContract(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("charge built for {expected:?} applied on {found:?}")]
    SideMismatch { expected: crate::fock::Side, found: crate::fock::Side },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("structure constants are not antisymmetric at c^{k}_({i},{j})")]
    NotAntisymmetric { k: usize, i: usize, j: usize },

    #[error("Jacobi identity fails at (i, j, k, l) = ({i}, {j}, {k}, {l})")]
    JacobiFailure { i: usize, j: usize, k: usize, l: usize },

    #[error("invalid torus weights: {0}")]
    InvalidTorusWeights(String),

    #[error("charge is not filtered by the torus grading (a pattern has weight {0} > 0)")]
    NotFiltered(i64),

    #[error("differential does not square to zero; witness {witness}")]
    NotNilpotent { witness: String },

    #[error("image of {0} leaves the truncated complex")]
    NotClosed(String),

    #[error("series arithmetic: {0}")]
    Series(String),

    #[error("zero-mode module: {0}")]
    ZeroModeModule(String),

    #[error("insufficient head-room: weight {requested} requested, truncation holds weight <= {available}")]
    HeadRoom { requested: u32, available: u32 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
