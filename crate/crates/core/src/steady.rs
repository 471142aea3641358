//! Closed-form stationary states of the dissipative map.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, ModelParams, DIM};
use crate::numerics::CMatrix;
use crate::scalar::Real;

/// Population/coherence coefficients without the degenerate-regime switch.
///
/// At `gamma = 1`, `n_g = 0` these are the `gamma -> 1^-` limits of the
/// unique-steady-state branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct RationalCoefficients<T: Real> {
    pub b1: T,
    pub b2: T,
    pub b4: T,
    pub d: T,
    pub h: T,
}

/// Coefficients of the stationary state, including the initial-state
/// dependent `R` terms that only survive at `gamma = 1`, `n_g = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct SteadyCoefficients<T: Real> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
    pub b4: T,
    pub d: T,
    pub h: T,
    pub r1: T,
    pub r2: Complex<T>,
    pub r3: T,
    /// `gamma = 1 and n_g = 0`.
    pub degenerate: bool,
}

/// Shared `(1 - gamma)^2` coefficient of the numerators (times four in `H`).
fn quadratic_part<T: Real>(ng: T, nl: T) -> T {
    (ng - nl) * (T::two() * ng * nl + ng - nl * nl)
}

/// Common denominator `H`. Must be positive.
///
/// Written as a polynomial in `e = 1 - gamma`: expanding in `gamma` instead
/// cancels terms of order `n_l^3` near `gamma = 1`, where `H` only grows linearly.
pub fn denominator<T: Real>(p: &ModelParams<T>) -> T {
    let (ng, nl) = (p.n_g(), p.n_l());
    let e = T::one() - p.gamma();
    let l = T::lit;
    let c0 = l(2.0) * (l(8.0) * ng * ng * nl + l(4.0) * ng * ng + l(8.0) * ng * nl + l(3.0) * ng + l(3.0) * nl + T::one());
    let c1 = l(-32.0) * ng * ng * nl - l(16.0) * ng * ng + l(24.0) * ng * nl * nl - l(8.0) * ng * nl - l(6.0) * ng
        + l(12.0) * nl * nl
        - T::one();
    c0 + e * c1 + e * e * l(8.0) * quadratic_part(ng, nl)
}

/// `B1, B2, B4, D, H` evaluated as rational functions, with no regime switch.
pub fn rational_coefficients<T: Real>(p: &ModelParams<T>) -> Result<RationalCoefficients<T>> {
    let (g, ng, nl) = (p.gamma(), p.n_g(), p.n_l());
    let l = T::lit;
    let one = T::one();
    let h = denominator(p);
    if !(h > T::zero()) {
        return Err(Error::NonPositiveDenominator {
            h: h.to_f64_lossy(),
            gamma: g.to_f64_lossy(),
            n_g: ng.to_f64_lossy(),
            n_l: nl.to_f64_lossy(),
        });
    }
    let e = one - g;
    let q = l(2.0) * e * e * quadratic_part(ng, nl);
    // Every e-linear coefficient shares -4 n_g^2 (2 n_l + 1) + 6 n_g n_l^2.
    let shared = l(-4.0) * ng * ng * (l(2.0) * nl + one) + l(6.0) * ng * nl * nl;
    let two_nl1 = l(2.0) * nl + one;
    let b1 = l(2.0) * ng * ng * two_nl1 + e * (shared + l(2.0) * ng * nl + nl * nl) + q;
    let b2 = (l(2.0) * ng + one) * (l(2.0) * ng * nl + ng + nl) + e * (shared - l(2.0) * ng * nl - ng + l(3.0) * nl * nl) + q;
    let b4 = l(2.0) * (ng + one) * (ng + one) * two_nl1
        + e * (shared - l(6.0) * ng * nl - l(4.0) * ng + l(5.0) * nl * nl - one)
        + q;
    let d = g * (ng - nl);
    Ok(RationalCoefficients { b1: b1 / h, b2: b2 / h, b4: b4 / h, d: d / h, h })
}

/// Stationary-state coefficients for the map `p` started from `rho0`.
///
/// The regime switch is the exact test `gamma == 1 && n_g == 0`.
pub fn steady_coefficients<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>) -> Result<SteadyCoefficients<T>> {
    let rational = rational_coefficients(p)?;
    let degenerate = p.is_degenerate();
    if !degenerate {
        return Ok(SteadyCoefficients {
            b1: rational.b1,
            b2: rational.b2,
            b3: rational.b2,
            b4: rational.b4,
            d: rational.d,
            h: rational.h,
            r1: T::zero(),
            r2: Complex::zero(),
            r3: T::zero(),
            degenerate,
        });
    }
    let r = |j: usize, k: usize| rho0.element(j, k);
    let r1 = (r(2, 2) - r(2, 3) - r(3, 2) + r(3, 3)).re * T::quarter();
    let r2 = (r(2, 4) - r(3, 4)) * T::half();
    let r3 = (r(1, 1) + r(4, 4) + r(2, 3) + r(3, 2)).re * T::half() + T::half();
    Ok(SteadyCoefficients {
        b1: T::zero(),
        b2: T::zero(),
        b3: T::zero(),
        b4: T::zero(),
        d: T::zero(),
        h: rational.h,
        r1,
        r2,
        r3,
        degenerate,
    })
}

impl<T: Real> SteadyCoefficients<T> {
    /// Assembles the stationary density matrix.
    pub fn state(&self) -> DensityMatrix<T> {
        let re = |x: T| Complex::new(x, T::zero());
        let mut m = CMatrix::zeros(DIM, DIM);
        m[(0, 0)] = re(self.b1);
        m[(1, 1)] = re(self.b2 + self.r1);
        m[(1, 2)] = re(self.d - self.r1);
        m[(1, 3)] = self.r2;
        m[(2, 1)] = re(self.d - self.r1);
        m[(2, 2)] = re(self.b3 + self.r1);
        m[(2, 3)] = -self.r2;
        m[(3, 1)] = self.r2.conj();
        m[(3, 2)] = -self.r2.conj();
        m[(3, 3)] = re(self.b4 + self.r3);
        DensityMatrix::from_matrix_unchecked(m).expect("4x4 by construction")
    }

    /// `B1 + B2 + B3 + B4 + 2 R1 + R3`, the trace of the assembled state.
    pub fn trace(&self) -> T {
        self.b1 + self.b2 + self.b3 + self.b4 + T::two() * self.r1 + self.r3
    }
}

/// Stationary state reached from `rho0`.
pub fn steady_state_closed_form<T: Real>(p: &ModelParams<T>, rho0: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    Ok(steady_coefficients(p, rho0)?.state())
}

/// The unique fixed point of the map; undefined at `gamma = 1`, `n_g = 0`.
pub fn fixed_point_state<T: Real>(p: &ModelParams<T>) -> Result<DensityMatrix<T>> {
    if p.is_degenerate() {
        return Err(Error::DegenerateRegime);
    }
    let c = rational_coefficients(p)?;
    let mut m = CMatrix::diagonal(&[c.b1, c.b2, c.b2, c.b4]);
    m[(1, 2)] = Complex::new(c.d, T::zero());
    m[(2, 1)] = Complex::new(c.d, T::zero());
    DensityMatrix::from_matrix_unchecked(m)
}
