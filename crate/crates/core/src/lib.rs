//! Frobenius-manifold data for the simple elliptic singularities.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact_algebra`]: rational multivariate polynomials with first-order jet
//!   coefficients, monomial orders, Buchberger Gröbner bases and normal forms.
//! * [`milnor_ring`]: the Ẽ6/Ẽ7/Ẽ8 models and their Jacobi-ring multiplication tables.
//! * [`special_functions`]: arbitrary-precision ₂F₁, Dedekind η and theta constants.
//! * [`flat_coords`]: the hypergeometric flat coordinate of the marginal deformation,
//!   its inverse and the linearisation data at the point `0★`.
//! * [`g_function`]: closed-form G-functions, the ring-route derivative, scaling
//!   anomalies, Virasoro right-hand sides and the Coxeter/folding tables.
//! * [`getzler`]: residual of Getzler's rank-4 equation for a prepotential and a G-function.
//! * [`halphen`]: the Halphen system, its theta-constant solution and the D4^(1,1) oracles.

pub mod error;
pub mod exact_algebra;
pub mod flat_coords;
pub mod g_function;
pub mod getzler;
pub mod halphen;
pub mod milnor_ring;
pub mod numeric;
pub mod special_functions;

pub use error::{GfnError, Result};
pub use exact_algebra::{Jet, Monomial, MonomialOrder, MultiPoly, Rat};
pub use milnor_ring::{ModelName, RingTable, SAssignment, SingularityModel};
pub use numeric::Precision;
