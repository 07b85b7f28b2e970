//! Finite categories, functors, cofunctors and lenses, with every law checked
//! by exhaustive enumeration.
//!
//! Lenses are pairs of a functor (Get) and a cofunctor (Put) that share an
//! object map. The crate also covers the span representation of cofunctors,
//! set-based lenses embedded as lenses between codiscrete categories, and a
//! desk-scale treatment of categories internal to `Cat` (double categories)
//! for split opfibrations.

pub mod category;
pub mod cofunctor;
pub mod corpus;
pub mod double;
pub mod enumerate;
mod error;
pub mod functor;
pub mod lens;
mod report;
pub mod state;

pub use category::{arrow_category, codiscrete, discrete, interval_n, terminal, FinCategory};
pub use cofunctor::{
    cofunctor_from_span, compose_cofunctors, identity_cofunctor, infer_p0, lambda_category, span_of_cofunctor,
    validate_cofunctor, CofunctorSpan, FinCofunctor,
};
pub use error::{Error, Result, StructureError};
pub use functor::{
    comma_category, compose_functors, identity_functor, is_discrete_opfibration, is_identity_on_objects,
    pullback_category, validate_functor, FinFunctor,
};
pub use lens::{compose_lenses, dopf_to_lens, lens_triangle, validate_lens, FinLens, LensTriangle};
pub use report::{ValidationReport, Violation};
pub use state::{compose_state_lenses, state_lens_to_internal, validate_state_lens, StateLens};

/// Validates a category, reporting every violated law instance.
pub fn validate_category(category: &FinCategory) -> ValidationReport {
    category.validate()
}
