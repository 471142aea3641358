//! Dense complex linear algebra, ODE integration and scalar search kernels.

pub mod eig;
pub mod matrix;
pub mod ode;
pub mod search;

pub use eig::{hermitian_eig, null_space, right_svd, EigenDecomposition, RightSvd};
pub use matrix::{inner, vec_max_abs_diff, vec_norm, CMatrix, CVector};
pub use ode::{integrate_linear_ode, integrate_with, OdeOptions};
pub use search::{golden_section_max, linspace};
