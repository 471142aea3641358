//! Concurrence, Haar-random product inputs and the entangling power of the
//! stationary map.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, ModelParams, DIM};
use crate::numerics::{golden_section_max, hermitian_eig, linspace, CMatrix};
use crate::scalar::Real;
use crate::steady::rational_coefficients;

/// Spin-flipped eigenvalues below this mean the input was not a valid state.
pub const INVALID_TOL: f64 = 1e-8;
/// Fixed Monte Carlo partition: chunk `k` always draws from ChaCha stream `k`.
pub const MC_CHUNK: usize = 4096;
pub const MIN_MC_SAMPLES: usize = 100;
pub const DEFAULT_SEARCH_MAX: f64 = 50.0;
const PRESCAN_POINTS: usize = 200;
const SEARCH_X_TOL: f64 = 1e-6;

/// `sigma_y ⊗ sigma_y` in the `|ee>, |eg>, |ge>, |gg>` basis. It is real, so
/// the spin flip is `Y rho* Y`.
fn sigma_yy<T: Real>() -> CMatrix<T> {
    CMatrix::from_real_fn(DIM, DIM, |i, j| match (i, j) {
        (0, 3) | (3, 0) => -T::one(),
        (1, 2) | (2, 1) => T::one(),
        _ => T::zero(),
    })
}

/// Wootters concurrence `max{0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)}`.
///
/// The `l_j` are obtained as eigenvalues of the Hermitian matrix
/// `sqrt(rho) rho~ sqrt(rho)`, which shares its spectrum with `rho rho~`.
/// Eigenvalues down to `-1e-8` (of either `rho` or that product) are treated
/// as rounding and clipped to zero; anything lower is an error.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let m = rho.matrix();
    let herm_tol = T::lit(1e-8);
    let eig = hermitian_eig(m, herm_tol)?;
    // A negative eigenvalue of rho would be hidden by the square root below; report it here.
    let smallest = eig.values[DIM - 1];
    if smallest < -T::lit(INVALID_TOL) {
        return Err(Error::InvalidConcurrence(smallest.to_f64_lossy()));
    }
    let floor = rounding_floor(eig.values[0]);
    let sqrt_rho = eig.map_spectrum(|x| if x <= floor { T::zero() } else { x.sqrt() });
    let y = sigma_yy::<T>();
    let flipped = y.matmul(&m.conj()).matmul(&y);
    let r = sqrt_rho.matmul(&flipped).matmul(&sqrt_rho);
    let r = CMatrix::from_fn(DIM, DIM, |i, j| (r[(i, j)] + r[(j, i)].conj()) * T::half());
    let values = hermitian_eig(&r, T::infinity())?.values;
    let floor = rounding_floor(values[0]);
    let mut roots = [T::zero(); DIM];
    for (root, &l) in roots.iter_mut().zip(values.iter()) {
        if l < -T::lit(INVALID_TOL) {
            return Err(Error::InvalidConcurrence(l.to_f64_lossy()));
        }
        *root = if l <= floor { T::zero() } else { l.sqrt() };
    }
    let c = roots[0] - roots[1] - roots[2] - roots[3];
    Ok(c.max(T::zero()).min(T::one()))
}

/// Eigenvalues this small are indistinguishable from zero after a Jacobi sweep.
/// Zeroing them keeps the square roots from turning `eps`-level noise into
/// `sqrt(eps)`-level errors on rank-deficient states.
fn rounding_floor<T: Real>(largest: T) -> T {
    T::lit(16.0) * T::epsilon() * largest.abs().max(T::one())
}

/// Bloch angles of a two-qubit product state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProductStateParams<T: Real> {
    pub theta1: T,
    pub theta2: T,
    pub phi1: T,
    pub phi2: T,
}

impl<T: Real> ProductStateParams<T> {
    /// Polar angles in `[0, pi]`, azimuths in `[0, 2 pi)`.
    pub fn new(theta1: T, theta2: T, phi1: T, phi2: T) -> Result<Self> {
        let pi = T::PI();
        let two_pi = pi + pi;
        for (name, v) in [("theta1", theta1), ("theta2", theta2)] {
            if !(v >= T::zero() && v <= pi) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, pi]")));
            }
        }
        for (name, v) in [("phi1", phi1), ("phi2", phi2)] {
            if !(v >= T::zero() && v < two_pi) {
                return Err(Error::InvalidArgument(format!("{name} = {v} outside [0, 2 pi)")));
            }
        }
        Ok(Self { theta1, theta2, phi1, phi2 })
    }

    /// `|1 - cos t1 cos t2 - cos(p1 - p2) sin t1 sin t2|`, eight times the
    /// stationary singlet weight `R1` reached from this input.
    pub fn singlet_overlap_factor(&self) -> T {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        (T::one() - c1 * c2 - (self.phi1 - self.phi2).cos() * s1 * s2).abs()
    }

    pub fn ket(&self) -> Vec<Complex<T>> {
        let qubit = |theta: T, phi: T| {
            let (s, c) = (theta * T::half()).sin_cos();
            [Complex::new(c, T::zero()), Complex::from_polar(s, phi)]
        };
        let a = qubit(self.theta1, self.phi1);
        let b = qubit(self.theta2, self.phi2);
        vec![a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    }
}

/// Projector onto `(cos(t1/2)|e> + sin(t1/2)e^{i p1}|g>) ⊗ (cos(t2/2)|e> + sin(t2/2)e^{i p2}|g>)`.
pub fn product_state_density<T: Real>(s: &ProductStateParams<T>) -> DensityMatrix<T> {
    let ket = s.ket();
    DensityMatrix::from_matrix_unchecked(CMatrix::outer(&ket, &ket)).expect("4x4 by construction")
}

/// Draws a product state from the Haar-induced measure: `cos(theta_k)`
/// uniform on `[-1, 1]`, `phi_k` uniform on `[0, 2 pi)`.
pub fn sample_product_state<T: Real, R: Rng + ?Sized>(rng: &mut R) -> ProductStateParams<T> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut polar = || T::lit((1.0 - 2.0 * rng.gen::<f64>()).clamp(-1.0, 1.0).acos());
    let theta1 = polar();
    let theta2 = polar();
    let phi1 = T::lit(two_pi * rng.gen::<f64>());
    let phi2 = T::lit(two_pi * rng.gen::<f64>());
    ProductStateParams { theta1, theta2, phi1, phi2 }
}

/// The input-independent part `2|D| - 2 sqrt(B1 B4)` with the regime switch applied
/// (zero at `gamma = 1`, `n_g = 0`).
fn switched_base<T: Real>(p: &ModelParams<T>) -> Result<T> {
    if p.is_degenerate() {
        // Still validates H > 0, as every steady-state evaluation does.
        rational_coefficients(p)?;
        return Ok(T::zero());
    }
    rational_power_part(p)
}

/// `2|D| - 2 sqrt(B1 B4)` evaluated from the rational coefficients, without the regime switch.
pub fn rational_power_part<T: Real>(p: &ModelParams<T>) -> Result<T> {
    let c = rational_coefficients(p)?;
    Ok(T::two() * c.d.abs() - T::two() * (c.b1 * c.b4).max(T::zero()).sqrt())
}

/// Closed-form stationary concurrence reached from a product input, before clamping.
pub fn steady_concurrence_unclamped<T: Real>(p: &ModelParams<T>, s: &ProductStateParams<T>) -> Result<T> {
    let base = switched_base(p)?;
    Ok(if p.is_degenerate() { base + T::quarter() * s.singlet_overlap_factor() } else { base })
}

/// Closed-form stationary concurrence reached from a product input, clamped at 0.
pub fn steady_concurrence_closed_form<T: Real>(p: &ModelParams<T>, s: &ProductStateParams<T>) -> Result<T> {
    Ok(steady_concurrence_unclamped(p, s)?.max(T::zero()))
}

/// How an entangling-power value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMode {
    Exact,
    Limit,
    MonteCarlo,
}

impl std::fmt::Display for PowerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PowerMode::Exact => "exact",
            PowerMode::Limit => "limit",
            PowerMode::MonteCarlo => "monte_carlo",
        })
    }
}

/// Closed-form evaluation modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormMode {
    /// Regime switch active: at `gamma = 1`, `n_g = 0` only the `1/4` term survives.
    Exact,
    /// Only at `gamma = 1`, `n_g = 0`: rational `B`, `D` (the `gamma -> 1^-` limit) plus `1/4`.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct EntanglingPowerResult<T: Real> {
    /// Clamped to `[0, 1]`.
    pub value: T,
    /// Closed-form value before clamping; the sample mean for Monte Carlo.
    pub unclamped: T,
    pub mode: PowerMode,
    pub std_error: T,
    pub sample_count: usize,
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// Haar-averaged stationary concurrence in closed form.
pub fn entangling_power_closed_form<T: Real>(p: &ModelParams<T>, mode: ClosedFormMode) -> Result<EntanglingPowerResult<T>> {
    let (unclamped, mode) = match mode {
        ClosedFormMode::Exact => {
            let third = if p.is_degenerate() { T::quarter() } else { T::zero() };
            (switched_base(p)? + third, PowerMode::Exact)
        }
        ClosedFormMode::Limit => {
            if !p.is_degenerate() {
                return Err(Error::LimitModeOutOfRegime);
            }
            (rational_power_part(p)? + T::quarter(), PowerMode::Limit)
        }
    };
    Ok(EntanglingPowerResult {
        value: clamp_unit(unclamped),
        unclamped,
        mode,
        std_error: T::zero(),
        sample_count: 0,
    })
}

/// Monte Carlo estimate of the entangling power over `n_samples` Haar product inputs.
///
/// Samples are split into fixed chunks of [`MC_CHUNK`]; chunk `k` uses ChaCha8
/// stream `k` of `seed`, and partial sums are combined in chunk order, so the
/// result is bitwise reproducible regardless of the rayon pool size.
pub fn entangling_power_monte_carlo<T: Real>(
    p: &ModelParams<T>,
    n_samples: usize,
    seed: u64,
) -> Result<EntanglingPowerResult<T>> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_MC_SAMPLES} samples, got {n_samples}")));
    }
    let base = switched_base(p)?;
    let degenerate = p.is_degenerate();
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = MC_CHUNK.min(n_samples - k * MC_CHUNK);
            let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
            for _ in 0..count {
                let s: ProductStateParams<T> = sample_product_state(&mut rng);
                let e = if degenerate { base + T::quarter() * s.singlet_overlap_factor() } else { base };
                let e = e.max(T::zero()).to_f64_lossy();
                sum += e;
                sum_sq += e * e;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(EntanglingPowerResult {
        value: T::lit(mean.clamp(0.0, 1.0)),
        unclamped: T::lit(mean),
        mode: PowerMode::MonteCarlo,
        std_error: T::lit((variance / n).sqrt()),
        sample_count: n_samples,
    })
}

/// Location and height of the entangling-power maximum along `n_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct OptimalNoise<T: Real> {
    pub n_l_star: T,
    pub e_star: T,
}

/// Maximises the exact-mode entangling power over `n_l ∈ [0, search_max]`.
///
/// A 200-point prescan picks the best grid cell, which golden-section search
/// refines to `1e-6`. The refinement runs on the unclamped value so it still
/// has a slope to follow near the region boundary. Returns `(0, 0)` when no
/// positive value is found.
pub fn optimal_local_noise<T: Real>(gamma: T, n_g: T, search_max: T) -> Result<OptimalNoise<T>> {
    if !(gamma >= T::zero() && gamma < T::one()) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} outside [0, 1)")));
    }
    if !(search_max > T::zero() && search_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("search_max = {search_max} must be positive")));
    }
    let at = |n_l: T| -> Result<T> { Ok(entangling_power_closed_form(&ModelParams::new(gamma, n_g, n_l)?, ClosedFormMode::Exact)?.unclamped) };
    let grid = linspace(T::zero(), search_max, PRESCAN_POINTS);
    let values = grid.iter().map(|&x| at(x)).collect::<Result<Vec<T>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(PRESCAN_POINTS - 1)];
    // Parameters stay valid inside the bracket, so evaluation errors cannot occur there.
    let (x, fx) = golden_section_max(|n_l| at(n_l).unwrap_or(T::neg_infinity()), lo, hi, T::lit(SEARCH_X_TOL));
    let (x, fx) = if fx >= values[best] { (x, fx) } else { (grid[best], values[best]) };
    if fx > T::zero() {
        Ok(OptimalNoise { n_l_star: x, e_star: fx.min(T::one()) })
    } else {
        Ok(OptimalNoise { n_l_star: T::zero(), e_star: T::zero() })
    }
}

/// `(U1 ⊗ U2) rho (U1 ⊗ U2)^dagger`.
pub fn locally_rotated<T: Real>(rho: &DensityMatrix<T>, u1: &CMatrix<T>, u2: &CMatrix<T>) -> DensityMatrix<T> {
    let u = u1.kron(u2);
    DensityMatrix::from_matrix_unchecked(rho.matrix().conjugate_by(&u)).expect("4x4 by construction")
}
