//! Finitely presented quadratic divisibility monoids: word problem, divisor
//! lattices, local deltas, Garside detection and small-rank census.

pub mod census;
pub mod delta;
pub mod element;
pub mod error;
pub mod garside;
pub mod lattice;
pub mod presentation;
pub mod properties;

pub use census::{
    brute_force_divisibility, canonical_form, census, classify, enumerate_presentations, CanonicalPresentation,
    CensusEntry, CensusOptions, CensusReport, Pruning,
};
pub use delta::{
    is_quasi_central, local_delta, quasi_center, upsilon_iteration, LocalDeltaOutcome, MissingResidue,
    QuasiCenterDescription, UpsilonTrace,
};
pub use element::{ClassBudget, Element, Engine, Monoid};
pub use error::{Error, Result};
pub use garside::{garside_divisor_properties, is_garside, minimal_garside_element, GarsideDivisors, GarsideReport};
pub use lattice::{divisor_lattice, BoundKind, Cover, DivisorLattice, FiniteLattice, HasseFormat, MissingBound};
pub use properties::{
    cross_engine_agreement, full_suite, run_checks, sample_pool, PropertyReport, PropertyViolation, SamplingPlan,
};
pub use presentation::{
    validate_divisibility, validate_with_budget, Alphabet, ConditionId, Generator, PairClasses,
    QuadraticPresentation, RelationPair, ValidationReport, Verdict, Violation, Word, MAX_RANK,
};
