//! Special functions: Γ, the Mittag-Leffler family and the spectral density
//! of E_α(−t^α).

mod gamma;
mod mittag_leffler;
mod order;
pub(crate) mod quadrature;

pub use gamma::{gamma, ln_gamma, GAMMA_MAX_ARG};
pub use mittag_leffler::{
    ml, ml_spectral, spectral_density, MlEvaluator, MlStrategy, DEFAULT_MAX_TERMS,
    DEFAULT_Z_SWITCH,
};
pub use order::{FractionalOrder, MlParameters, Normalization};

pub(crate) use gamma::rgamma;
pub(crate) use mittag_leffler::ml_unchecked;
