//! Exact fusion rules for `Hilb(G)` with `G` finite abelian, and the pointed
//! `K₀` invariant of AF-actions presented by enriched Bratteli diagrams.
//!
//! Q-systems are subgroups `H ≤ G`; simple `H – K` bimodules are pairs of a
//! coset of `H + K` and a character of `H ∩ K`. Their relative tensor products
//! are computed from explicit monomial models in exact cyclotomic arithmetic,
//! and the diagram invariant is assembled from stationary `K₀` computations.

pub mod abelian;
pub mod crossed;
pub mod cyclotomic;
pub mod diagram;
pub mod equivalence;
pub mod error;
pub mod invariant;
pub mod json;
pub mod k0;
pub mod qsys;

pub use abelian::{
    coset_space, dual_characters, subgroups, Character, CocycleTable, Coset, Element, FiniteAbelianGroup, Phase,
    Subgroup, DEFAULT_MAX_GROUP_ORDER,
};
pub use crossed::{crossed_product_blocks, k0_rank, twisted_group_algebra, CrossedProductBlocks, TwistedGroupAlgebra};
pub use cyclotomic::CyclotomicNumber;
pub use diagram::{DiagramEdge, EnrichedBratteliDiagram};
pub use equivalence::{compare, verify_witness, Certificate, CertificateKind, Verdict, Witness};
pub use error::{Error, Result};
pub use invariant::{compute_invariant, compute_invariant_with, hom_basis, InvariantData, PointedValue};
pub use k0::{
    limit_rank, morphism_multiplier, shift_equivalent_bounded, stationary_k0, value_map, IntMatrix, K0Description,
    StationarySystem,
};
pub use qsys::{
    dual, fuse, fusion_table, identity_bimodule, qsystems, simple_bimodules, FusionTable, QSystem, QSystemSet,
    SimpleBimodule,
};
