//! Exact computations in free-field vertex superalgebras: the chiral de Rham
//! complex of affine space, its Landau–Ginzburg twists by a potential, the
//! Lie-algebra BRST charge, per-weight cohomology and bigraded characters.

pub mod charges;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod fock;
pub mod linalg;
pub mod modfun;
pub mod oper;
pub mod qseries;

pub use charges::{
    check_anticommute, check_nilpotent, chiral_de_rham, lie_charge, potential_charge, torus_profile,
    validate_homogeneity, CheckReport, Potential, StructureConstants,
};
pub use cohomology::{
    boundary_matrix, chi_van, classify, cohomology_dims, euler_series, ChargeKind, ChiVan, CohomologyTable,
    ComplexDims, MatrixBlock, Truncation, WeightCohomology,
};
pub use error::{Error, Result};
pub use field::{field_mode, residue_charge, state_from_text, ResidueCharge};
pub use fock::{
    enumerate_basis, enumerate_torus_range, grade, make_space, normalize, BasisQuery, BiGrade, Coeff, Family, ModeKey,
    Monomial, Side, SpaceSpec, State, TorusWeights,
};
pub use modfun::{check_epsilon, induce, singular_vectors, EpsilonReport, TruncatedModule, ZeroModeModule};
pub use oper::{
    apply_mode, apply_term, instantiate_charge, supercommutator, translate, InstantiatedCharge, Letter, OperatorTerm,
    Pattern, SymbolicCharge,
};
pub use qseries::{chi_closed_form, compare, theta, Comparison, TruncatedSeries};
