//! Exact multivariate polynomial arithmetic over ℚ and over the dual numbers
//! ℚ[ε]/(ε²), together with a Buchberger Gröbner-basis engine.
//!
//! Coefficients are [`Rat`] (GMP rationals, always in lowest terms) or [`Jet`]
//! (a rational value plus the coefficient of a nilpotent ε). The Gröbner engine
//! itself only ever sees rational coefficients: jet-valued generators are lifted
//! by adjoining ε as a trailing variable together with the generator ε².

mod groebner;
mod jet;
pub mod json;
pub mod linalg;
mod monomial;
mod order;
mod poly;

pub use groebner::{
    buchberger, groebner_basis, groebner_basis_with_budget, normal_form, reduce, GroebnerBasis,
    DEFAULT_STEP_BUDGET,
};
pub use jet::Jet;
pub use monomial::Monomial;
pub use order::MonomialOrder;
pub use poly::{poly_mul, Coeff, MultiPoly};

/// Exact rational number. `rug::Rational` keeps itself canonical (lowest terms,
/// positive denominator) after every operation.
pub type Rat = rug::Rational;

/// Shorthand for `p/q`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::from((p, q))
}
