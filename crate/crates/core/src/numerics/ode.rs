//! Adaptive Dormand–Prince 5(4) integration of `v' = M v`.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_STEPS: usize = 5_000_000;

// Butcher tableau (Dormand & Prince 1980).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth-order weights minus the embedded fourth-order ones.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T: Real> {
    /// Relative tolerance per step.
    pub rel_tol: T,
    /// Absolute floor, as a fraction of the initial vector's max-norm.
    pub abs_floor: T,
}

impl<T: Real> OdeOptions<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self { rel_tol, abs_floor: rel_tol * T::lit(1e-2) }
    }
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self::with_rel_tol(T::lit(1e-10))
    }
}

fn axpy_into<T: Real>(out: &mut [Complex<T>], base: &[Complex<T>], terms: &[(&[Complex<T>], T)]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = base[i];
        for (k, w) in terms {
            acc += k[i] * *w;
        }
        *o = acc;
    }
}

/// Integrates `v' = M v` from `v(0) = v0` to time `t` with an adaptive
/// Dormand–Prince 5(4) pair. Returns `v0` unchanged at `t = 0`.
pub fn integrate_linear_ode<T: Real>(m: &CMatrix<T>, v0: &[Complex<T>], t: T, rel_tol: T) -> Result<CVector<T>> {
    integrate_with(m, v0, t, OdeOptions::with_rel_tol(rel_tol))
}

pub fn integrate_with<T: Real>(m: &CMatrix<T>, v0: &[Complex<T>], t: T, opts: OdeOptions<T>) -> Result<CVector<T>> {
    if !m.is_square() {
        return Err(Error::Shape(format!("generator is {}x{}", m.rows(), m.cols())));
    }
    if v0.len() != m.cols() {
        return Err(Error::Shape(format!("state of length {} for a {}-dimensional generator", v0.len(), m.cols())));
    }
    if t < T::zero() || !t.is_finite() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    if t.is_zero() {
        return Ok(v0.to_vec());
    }
    let n = v0.len();
    let lit = T::lit;
    let scale0 = v0.iter().fold(T::zero(), |a, z| a.max(z.norm()));
    let atol = (opts.abs_floor * scale0).max(T::min_positive_value());
    let rtol = opts.rel_tol;

    let mut y = v0.to_vec();
    let mut k1 = m.matvec(&y);
    let mut k2 = vec![Complex::zero(); n];
    let mut k3 = k2.clone();
    let mut k4 = k2.clone();
    let mut k5 = k2.clone();
    let mut k6 = k2.clone();
    let mut k7 = k2.clone();
    let mut tmp = k2.clone();
    let mut y_new = k2.clone();

    // Initial step from the generator's scale.
    let gen_scale = m.max_abs() * T::from_usize_lossy(n);
    let mut h = if gen_scale > T::zero() { lit(0.01) / gen_scale } else { t };
    h = h.min(t);
    let mut time = T::zero();

    for _ in 0..MAX_STEPS {
        if time >= t {
            return Ok(y);
        }
        let last = time + h >= t;
        if last {
            h = t - time;
        }
        axpy_into(&mut tmp, &y, &[(&k1, h * lit(A21))]);
        m.matvec_into(&tmp, &mut k2);
        axpy_into(&mut tmp, &y, &[(&k1, h * lit(A31)), (&k2, h * lit(A32))]);
        m.matvec_into(&tmp, &mut k3);
        axpy_into(&mut tmp, &y, &[(&k1, h * lit(A41)), (&k2, h * lit(A42)), (&k3, h * lit(A43))]);
        m.matvec_into(&tmp, &mut k4);
        axpy_into(
            &mut tmp,
            &y,
            &[(&k1, h * lit(A51)), (&k2, h * lit(A52)), (&k3, h * lit(A53)), (&k4, h * lit(A54))],
        );
        m.matvec_into(&tmp, &mut k5);
        axpy_into(
            &mut tmp,
            &y,
            &[
                (&k1, h * lit(A61)),
                (&k2, h * lit(A62)),
                (&k3, h * lit(A63)),
                (&k4, h * lit(A64)),
                (&k5, h * lit(A65)),
            ],
        );
        m.matvec_into(&tmp, &mut k6);
        axpy_into(
            &mut y_new,
            &y,
            &[
                (&k1, h * lit(B1)),
                (&k3, h * lit(B3)),
                (&k4, h * lit(B4)),
                (&k5, h * lit(B5)),
                (&k6, h * lit(B6)),
            ],
        );
        m.matvec_into(&y_new, &mut k7);

        let mut err = T::zero();
        for i in 0..n {
            let e = (k1[i] * lit(E1) + k3[i] * lit(E3) + k4[i] * lit(E4) + k5[i] * lit(E5) + k6[i] * lit(E6) + k7[i] * lit(E7))
                * h;
            let sc = atol + rtol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Integration(format!("non-finite error estimate at t = {}", time)));
        }

        if err <= T::one() {
            time = if last { t } else { time + h };
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
        }
        let factor = if err.is_zero() { lit(5.0) } else { (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2)) };
        h = h * factor;
        if h <= T::epsilon() * t {
            return Err(Error::Integration(format!("step size underflow at t = {}", time)));
        }
    }
    Err(Error::Integration(format!("exceeded {MAX_STEPS} steps")))
}
