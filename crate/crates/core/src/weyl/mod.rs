//! Exact symbolic engine over the Weyl algebra `[p, x] = -i` with
//! coefficients that are truncated power series in the deformation
//! parameters `mu`, `nu`.

mod element;
mod identities;
mod param;
mod scalar;
mod series;

use thiserror::Error;

pub use element::{BracketKind, WeylMonomial, WeylSeriesElement};
pub use identities::{
    binomial_sqrt, central_identity_residual, central_identity_rhs, cosh_series, deformed_momentum,
    deformed_position, exp_series, first_order_check, first_order_form, free_particle_rule,
    sinh_over_param, sqrt_one_plus_square, tan_momentum, weyl_exchange_check, FirstOrderCheck,
    Side,
};
pub use param::{ParamExponent, ParamPolynomial};
pub use scalar::RationalComplex;
pub use series::{prefactor_series, tan_coefficients, ScalarSeries};

/// Default truncation degree for verification runs.
pub const DEFAULT_DEGREE: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeylError {
    #[error("truncation degrees differ: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("square-root argument mixes x and p")]
    NotSingleGenerator,
    #[error("square-root argument has a parameter-free part")]
    NotNilpotent,
    #[error("series contains powers of x")]
    ContainsPosition,
    #[error("division by a series with zero constant term")]
    SingularDivisor,
}
