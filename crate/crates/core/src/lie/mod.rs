//! Finite-dimensional Lie algebras, representations, Chevalley-Eilenberg
//! cohomology, constrained cocycle solving, and invariant jet extension.

mod algebra;
mod ce;
mod cocycle;
mod extension;
mod rep;

pub use algebra::{build_so, LieAlgebraData, RotationPair, SoBasis};
pub use ce::{ce_differential, cohomology_dims, complex_squares_to_zero, CohomologyRecord};
pub use cocycle::{cocycle_residual, cocycle_space, CocycleConstraints, CocycleSolution, JetRealization};
pub use extension::{invariant_jet_extension, ExtensionResult, FiberValue, ObstructionReport};
pub use rep::{isotropy_vector_action, standard_so_rep, sym2_action_from_vector, Representation};
