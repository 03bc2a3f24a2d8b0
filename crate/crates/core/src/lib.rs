//! Computational estimates and certificates for first L2-Betti numbers of
//! finitely presented groups: Fox-derivative matrices, exact integer
//! linear algebra, Todd-Coxeter coset enumeration, finite-quotient chains
//! with the Betti-ratio estimator, spectral-measure diagnostics, torsion
//! lower bounds, normal-rank witnesses, and the marked-groups metric.

pub mod bounds;
pub mod cosets;
pub mod fixtures;
pub mod foxcalc;
pub mod presentations;
pub mod quotients;
pub mod spectral;
pub mod zlinalg;

pub use bounds::{
    check_irreducibility, generator_bound, marked_distance, normal_rank_witness, pt_lower_bound,
    sigma, BoundQuantity, BoundReport, DistanceResult, Evidence, Irreducibility, MarkedGroup,
};
pub use cosets::{
    reidemeister_schreier, subgroup_betti1, todd_coxeter, trivial_quotient_check, CosetTable,
    Enumeration, TrivialityCheck,
};
pub use fixtures::{fixture_text, load_fixture, FixtureError};
pub use foxcalc::{augment_matrix, extend_jacobian, fox_derivative, fox_jacobian, JacobianBundle};
pub use presentations::{
    free_reduce, parse_presentation, parse_word, GroupRingElement, GroupRingMatrix, Letter,
    Parsed, ParseError, Presentation, PresentationError, TorsionPresentation, Word,
};
pub use quotients::{
    build_chain, intersect_quotients, luck_estimate, search_finite_quotients, BettiEstimate,
    BettiSample, FiniteQuotient, QuotientChain, QuotientError, DEFAULT_ORDER_CAP,
};
pub use spectral::{
    induce_regular_matrix, log_bound_report, moment_check, normalized_kernel_dimension,
    spectral_measure, z1_dimension_estimate, LogBoundReport, MomentCheck, SpectralError,
    SpectralMeasure, Z1Estimate,
};
pub use zlinalg::{betti1, is_perfect, rank, smith_normal_form, Betti1, IntegerMatrix, SnfResult};

use num_rational::BigRational;

/// Serializes a rational as `"p/q"` in lowest terms, `"0/1"` for zero.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
