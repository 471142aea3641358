//! Transient dynamics and numeric steady states.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_liouvillian_generic, devectorize_matrix, vectorize, vectorize_matrix, DensityMatrix, Liouvillian,
    ModelParams, DIM,
};
use crate::numerics::{integrate_linear_ode, null_space, vec_max_abs_diff, CMatrix, CVector};
use crate::scalar::Real;

/// Relative per-step tolerance used for every propagation.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Kernel threshold used when probing for a unique steady state.
pub const KERNEL_TOL: f64 = 1e-10;
/// Latest time tried by the long-time fallback of [`steady_state_numeric`].
pub const STEADY_T_MAX: f64 = 200.0;
/// `||v(T) - v(T/2)||` below which the long-time fallback is converged.
pub const STEADY_CONVERGENCE: f64 = 1e-10;

/// Propagates an arbitrary 4x4 operator (not necessarily a state) for time `t`.
pub fn propagate_matrix<T: Real>(generator: &Liouvillian<T>, m: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    let v = integrate_linear_ode(generator.matrix(), &vectorize_matrix(m), t, T::lit(DEFAULT_REL_TOL))?;
    devectorize_matrix(&v)
}

/// `rho(t)` for the map selected by `p`, by numeric integration of `v' = M v`.
pub fn evolve<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    evolve_with(&build_liouvillian_generic(p), rho0, t)
}

/// As [`evolve`] with a prebuilt generator.
pub fn evolve_with<T: Real>(generator: &Liouvillian<T>, rho0: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_matrix_unchecked(propagate_matrix(generator, rho0.matrix(), t)?)
}

/// Time-dependent coefficients `A1(t)..A10(t)` of the closed-form propagator at `gamma = 1`, `n_g = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct AnalyticCoefficients<T: Real> {
    values: [T; 10],
}

impl<T: Real> AnalyticCoefficients<T> {
    /// `A_k` with 1-based `k`.
    pub fn a(&self, k: usize) -> T {
        self.values[k - 1]
    }

    pub fn values(&self) -> &[T; 10] {
        &self.values
    }
}

/// Evaluates `A1(t)..A10(t)`.
///
/// `A8(t) = (1/2) e^{-4t} (1 - e^{2t})`, i.e. `A1 * A10`. Half that value
/// disagrees with direct integration of the master equation by exactly a
/// factor of two on every coherence it touches.
pub fn analytic_coefficients<T: Real>(t: T) -> Result<AnalyticCoefficients<T>> {
    if t < T::zero() || !t.is_finite() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    let one = T::one();
    let two = T::two();
    let four = T::lit(4.0);
    let q = T::quarter();
    let h = T::half();
    let e2 = (-two * t).exp();
    let e4 = (-four * t).exp();
    // e^{-4t} (1 +- e^{2t})^2 = (e^{-2t} +- 1)^2, written to stay finite at large t.
    let values = [
        e2,
        two * t * e4,
        q * (e2 + one) * (e2 + one),
        q * (one - e2) * (one - e2),
        -q * (one - e4),
        one - e4 - four * t * e4,
        h * (e4 + e2),
        h * (e4 - e2),
        h * (one + e2),
        -h * (one - e2),
    ];
    Ok(AnalyticCoefficients { values })
}

/// `A8(t)` as it is usually printed, `(1/4) e^{-4t} (1 - e^{2t})`. Kept only to
/// demonstrate the mismatch with the generator; nothing else uses it.
pub fn a8_as_printed<T: Real>(t: T) -> T {
    T::quarter() * ((-T::lit(4.0) * t).exp() - (-T::two() * t).exp())
}

/// Closed-form `rho(t)` for the purely global zero-temperature map, applied to
/// any 4x4 operator (linear in its argument).
pub fn propagate_analytic_pure_global<T: Real>(rho0: &CMatrix<T>, t: T) -> Result<CMatrix<T>> {
    if rho0.rows() != DIM || rho0.cols() != DIM {
        return Err(Error::Shape(format!("expected 4x4 operator, got {}x{}", rho0.rows(), rho0.cols())));
    }
    let c = analytic_coefficients(t)?;
    let a = |k: usize| c.a(k);
    let r = |j: usize, k: usize| rho0[(j - 1, k - 1)];
    let mut out = CMatrix::zeros(DIM, DIM);
    let mut set = |j: usize, k: usize, z: Complex<T>| out[(j - 1, k - 1)] = z;
    let two = T::two();

    set(1, 1, r(1, 1) * (a(1) * a(1)));
    set(1, 2, r(1, 2) * a(7) + r(1, 3) * a(8));
    set(1, 3, r(1, 2) * a(8) + r(1, 3) * a(7));
    set(1, 4, r(1, 4) * a(1));
    set(2, 1, r(2, 1) * a(7) + r(3, 1) * a(8));
    set(3, 1, r(2, 1) * a(8) + r(3, 1) * a(7));
    set(4, 1, r(4, 1) * a(1));

    set(2, 2, r(1, 1) * a(2) + r(2, 2) * a(3) + r(3, 3) * a(4) + (r(2, 3) + r(3, 2)) * a(5));
    set(3, 3, r(1, 1) * a(2) + r(2, 2) * a(4) + r(3, 3) * a(3) + (r(2, 3) + r(3, 2)) * a(5));
    set(2, 3, r(1, 1) * a(2) + (r(2, 2) + r(3, 3)) * a(5) + r(2, 3) * a(3) + r(3, 2) * a(4));
    set(3, 2, r(1, 1) * a(2) + (r(2, 2) + r(3, 3)) * a(5) + r(2, 3) * a(4) + r(3, 2) * a(3));

    let up = (r(1, 2) + r(1, 3)) * (-two * a(8));
    let down = (r(2, 1) + r(3, 1)) * (-two * a(8));
    set(2, 4, up + r(2, 4) * a(9) + r(3, 4) * a(10));
    set(3, 4, up + r(2, 4) * a(10) + r(3, 4) * a(9));
    set(4, 2, down + r(4, 2) * a(9) + r(4, 3) * a(10));
    set(4, 3, down + r(4, 2) * a(10) + r(4, 3) * a(9));

    set(4, 4, r(1, 1) * a(6) - (r(2, 2) + r(2, 3) + r(3, 2) + r(3, 3)) * (two * a(5)) + r(4, 4));
    Ok(out)
}

/// Closed-form `rho(t)` for `gamma = 1`, `n_g = 0` (the regime is fixed by construction).
pub fn evolve_analytic_pure_global<T: Real>(rho0: &DensityMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    DensityMatrix::from_matrix_unchecked(propagate_analytic_pure_global(rho0.matrix(), t)?)
}

/// Normalises a kernel vector of `M` to a unit-trace density matrix.
fn kernel_state<T: Real>(v: &[Complex<T>]) -> Result<DensityMatrix<T>> {
    let m = devectorize_matrix(v)?;
    let tr = m.trace();
    if tr.norm() <= T::epsilon() {
        return Err(Error::Integration("kernel vector has vanishing trace".into()));
    }
    let m = m.scale_c(tr.inv());
    // Restore exact Hermiticity lost to rounding.
    let sym = CMatrix::from_fn(DIM, DIM, |i, j| (m[(i, j)] + m[(j, i)].conj()) * T::half());
    DensityMatrix::from_matrix_unchecked(sym)
}

/// Stationary state reached from `rho0`.
///
/// A one-dimensional kernel of `M` gives the answer directly (and `rho0` is
/// ignored). Otherwise the state is propagated to `T = 12.5, 25, ..., 200`
/// until `||v(T) - v(T/2)|| <= 1e-10`.
pub fn steady_state_numeric<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let generator = build_liouvillian_generic(p);
    let kernel = null_space(generator.matrix(), T::lit(KERNEL_TOL))?;
    if kernel.len() == 1 {
        return kernel_state(&kernel[0]);
    }
    long_time_limit(&generator, rho0)
}

/// Propagates with time doubling until successive states agree to [`STEADY_CONVERGENCE`].
pub fn long_time_limit<T: Real>(generator: &Liouvillian<T>, rho0: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    let rel_tol = T::lit(DEFAULT_REL_TOL);
    let t_max = T::lit(STEADY_T_MAX);
    let mut horizon = t_max / T::lit(16.0);
    let mut v: CVector<T> = integrate_linear_ode(generator.matrix(), &vectorize(rho0), horizon / T::two(), rel_tol)?;
    let mut residual = T::infinity();
    let mut elapsed = horizon / T::two();
    while horizon <= t_max {
        let next = integrate_linear_ode(generator.matrix(), &v, horizon - elapsed, rel_tol)?;
        residual = vec_max_abs_diff(&next, &v);
        v = next;
        elapsed = horizon;
        if residual <= T::lit(STEADY_CONVERGENCE) {
            return DensityMatrix::from_matrix_unchecked(devectorize_matrix(&v)?);
        }
        horizon = horizon * T::two();
    }
    Err(Error::SteadyStateNotConverged { t_max: STEADY_T_MAX, residual: residual.to_f64_lossy() })
}
