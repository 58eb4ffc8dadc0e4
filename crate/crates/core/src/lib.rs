//! Extended Riesz transforms `T f = K * f` with kernel
//! `K_j(x) = x_j / |x|^{n+1-beta}`, `0 <= beta < n`, on periodic boxes in one to
//! three dimensions.
//!
//! The crate evaluates the operator two independent ways (exact Fourier
//! multiplier, sampled-kernel convolution), splits it into near and far
//! parts, performs the dyadic Calderon-Zygmund decomposition, and measures the
//! constants in the norm and distribution inequalities the family satisfies.
//! [`sqg`] reconstructs generalized SQG velocities from the same machinery.

pub mod acceptance;
pub mod cli;
pub mod czd;
pub mod error;
mod fft;
pub mod field;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod quadrature;
pub mod report;
pub mod sqg;
pub mod testfield;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use field::{
    distribution_measure, forward_transform, inverse_transform, inverse_transform_complex,
    lq_norm, BoxDomain, GridField, SpectralField,
};
pub use kernels::{
    cutoff, eval_k, eval_k1, eval_k2, gamma_beta, k1_hat_quadrature, multiplier_symbol,
    KernelSpec,
};
pub use testfield::{make_test_field, FieldSpec};
