//! Channel representations of the dissipative map: Choi matrices, Kraus
//! sets, and the closed-form Kraus families.
//!
//! Choi convention: `C = sum_{jk} |j><k| ⊗ D(|j><k|)` (unnormalised maximally
//! entangled vector), so `C[(4j + a, 4k + b)] = D(|j><k|)[a][b]` and a trace-preserving
//! map has `tr C = 4`. A Choi eigenvector `c` folds into the Kraus operator
//! whose `k`-th column is the `k`-th length-4 segment of `c`.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{analytic_coefficients, propagate_analytic_pure_global, propagate_matrix};
use crate::model::{build_liouvillian_generic, vec_index, DensityMatrix, ModelParams, DIM, VEC_DIM};
use crate::numerics::{hermitian_eig, CMatrix, CVector};
use crate::scalar::Real;
use crate::steady::rational_coefficients;

/// Eigenvalues below this (absolute) mean the map is not completely positive.
pub const CP_TOL: f64 = 1e-9;
/// Default drop threshold for Choi eigenvalues, relative to the largest one.
pub const KRAUS_DROP_TOL: f64 = 1e-12;
/// Completeness/channel mismatch above which a closed-form Kraus set is rejected.
pub const ANALYTIC_ACCEPT_TOL: f64 = 1e-6;

/// 16x16 Choi matrix of a map on 4x4 operators.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ChoiMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn from_matrix(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.rows() != VEC_DIM || matrix.cols() != VEC_DIM {
            return Err(Error::Shape(format!("Choi matrix must be 16x16, got {}x{}", matrix.rows(), matrix.cols())));
        }
        Ok(Self { matrix })
    }

    /// Builds the Choi matrix of any linear map given by its action on 4x4 operators.
    pub fn from_map(mut map: impl FnMut(&CMatrix<T>) -> Result<CMatrix<T>>) -> Result<Self> {
        let mut matrix = CMatrix::zeros(VEC_DIM, VEC_DIM);
        for j in 0..DIM {
            for k in 0..DIM {
                let image = map(&CMatrix::unit(DIM, j, k))?;
                for a in 0..DIM {
                    for b in 0..DIM {
                        matrix[(vec_index(j, a), vec_index(k, b))] = image[(a, b)];
                    }
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// The image `D(|j><k|)` stored in block `(j, k)` (0-based).
    pub fn block(&self, j: usize, k: usize) -> CMatrix<T> {
        CMatrix::from_fn(DIM, DIM, |a, b| self.matrix[(vec_index(j, a), vec_index(k, b))])
    }

    /// Applies the encoded map to an operator.
    pub fn apply(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(DIM, DIM);
        for j in 0..DIM {
            for k in 0..DIM {
                let w = rho[(j, k)];
                if w.is_zero() {
                    continue;
                }
                out = &out + &self.block(j, k).scale_c(w);
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    pub fn hermiticity_deviation(&self) -> T {
        self.matrix.hermiticity_deviation()
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let sym = CMatrix::from_fn(VEC_DIM, VEC_DIM, |i, j| (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * T::half());
        Ok(hermitian_eig(&sym, T::infinity())?.values[VEC_DIM - 1])
    }

    /// Partial trace over the output factor minus the identity: zero for trace-preserving maps.
    pub fn trace_preservation_residual(&self) -> T {
        let mut worst = T::zero();
        for j in 0..DIM {
            for k in 0..DIM {
                let tr = self.block(j, k).trace();
                let want = if j == k { T::one() } else { T::zero() };
                worst = worst.max((tr - Complex::new(want, T::zero())).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Ordered Kraus operators `{K}` representing `rho -> sum K rho K^dagger`.
#[derive(Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct KrausSet<T: Real> {
    operators: Vec<CMatrix<T>>,
    /// `||sum K^dagger K - I||` (largest entry modulus).
    completeness_residual: T,
}

impl<T: Real> fmt::Debug for KrausSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KrausSet")
            .field("len", &self.operators.len())
            .field("completeness_residual", &self.completeness_residual)
            .field("operators", &self.operators)
            .finish()
    }
}

impl<T: Real> KrausSet<T> {
    pub fn new(operators: Vec<CMatrix<T>>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument("empty Kraus set".into()));
        }
        if let Some(op) = operators.iter().find(|k| k.rows() != DIM || k.cols() != DIM) {
            return Err(Error::Shape(format!("Kraus operator must be 4x4, got {}x{}", op.rows(), op.cols())));
        }
        let mut sum = CMatrix::zeros(DIM, DIM);
        for k in &operators {
            sum = &sum + &k.adjoint().matmul(k);
        }
        let completeness_residual = sum.max_abs_diff(&CMatrix::identity(DIM));
        Ok(Self { operators, completeness_residual })
    }

    pub fn operators(&self) -> &[CMatrix<T>] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn completeness_residual(&self) -> T {
        self.completeness_residual
    }

    /// `sum K rho K^dagger` on an arbitrary operator.
    pub fn apply_matrix(&self, rho: &CMatrix<T>) -> CMatrix<T> {
        let mut out = CMatrix::zeros(DIM, DIM);
        for k in &self.operators {
            out = &out + &k.matmul(rho).matmul(&k.adjoint());
        }
        out
    }

    pub fn choi(&self) -> ChoiMatrix<T> {
        ChoiMatrix::from_map(|m| Ok(self.apply_matrix(m))).expect("Kraus action is infallible")
    }

    /// Largest entry difference between the two channels' actions on all 16 matrix units.
    pub fn channel_distance(&self, other: &Self) -> T {
        self.choi().max_abs_diff(&other.choi())
    }

    /// Operators with Frobenius norm above `tol`.
    pub fn nonzero_operators(&self, tol: T) -> Vec<&CMatrix<T>> {
        self.operators.iter().filter(|k| k.frobenius_norm() > tol).collect()
    }
}

/// `sum K rho K^dagger`.
pub fn apply_kraus<T: Real>(kraus: &KrausSet<T>, rho: &DensityMatrix<T>) -> DensityMatrix<T> {
    DensityMatrix::from_matrix_unchecked(kraus.apply_matrix(rho.matrix())).expect("4x4 by construction")
}

/// Choi matrix of the time-`t` map, from numeric evolution of each matrix unit.
pub fn choi_matrix<T: Real>(p: &ModelParams<T>, t: T) -> Result<ChoiMatrix<T>> {
    if t < T::zero() || !t.is_finite() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    let generator = build_liouvillian_generic(p);
    ChoiMatrix::from_map(|unit| propagate_matrix(&generator, unit, t))
}

/// Choi matrix of the purely global zero-temperature map from its closed-form propagator.
pub fn choi_matrix_pure_global_analytic<T: Real>(t: T) -> Result<ChoiMatrix<T>> {
    ChoiMatrix::from_map(|unit| propagate_analytic_pure_global(unit, t))
}

/// Folds a length-16 vector into the 4x4 matrix whose `k`-th column is the `k`-th segment.
pub fn fold_segments<T: Real>(c: &[Complex<T>]) -> CMatrix<T> {
    assert_eq!(c.len(), VEC_DIM, "Choi vector must have 16 entries");
    CMatrix::from_fn(DIM, DIM, |a, k| c[vec_index(k, a)])
}

/// Inverse of [`fold_segments`].
pub fn unfold_segments<T: Real>(k: &CMatrix<T>) -> CVector<T> {
    let mut c = vec![Complex::zero(); VEC_DIM];
    for col in 0..DIM {
        for a in 0..DIM {
            c[vec_index(col, a)] = k[(a, col)];
        }
    }
    c
}

/// Kraus operators from the spectral decomposition of a Choi matrix.
///
/// Eigenvectors are scaled to norm `sqrt(lambda)` and folded; eigenvalues
/// below `tol * lambda_max` are dropped. Order follows descending eigenvalues.
pub fn kraus_from_choi<T: Real>(choi: &ChoiMatrix<T>, tol: T) -> Result<KrausSet<T>> {
    let herm_tol = T::lit(1e-8) * choi.matrix.max_abs().max(T::one());
    let eig = hermitian_eig(&choi.matrix, herm_tol)?;
    let smallest = eig.values[VEC_DIM - 1];
    if smallest < -T::lit(CP_TOL) {
        return Err(Error::NotCompletelyPositive { eigenvalue: smallest.to_f64_lossy() });
    }
    let cutoff = tol * eig.values[0].max(T::zero());
    let mut operators = Vec::new();
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda <= cutoff || lambda <= T::zero() {
            continue;
        }
        let c: CVector<T> = eig.vector(k).into_iter().map(|z| z * lambda.sqrt()).collect();
        operators.push(fold_segments(&c));
    }
    if operators.is_empty() {
        operators.push(CMatrix::zeros(DIM, DIM));
    }
    KrausSet::new(operators)
}

/// Spectral decomposition `(upsilon_j, psi_j)` of the fixed point, with normalised eigenvectors
/// `|1>`, `|4>`, `(|3> - |2>)/sqrt 2`, `(|2> + |3>)/sqrt 2` and eigenvalues
/// `B1`, `B4`, `B2 - D`, `B2 + D`.
pub fn fixed_point_spectrum<T: Real>(p: &ModelParams<T>) -> Result<Vec<(T, CVector<T>)>> {
    if p.is_degenerate() {
        return Err(Error::DegenerateRegime);
    }
    let c = rational_coefficients(p)?;
    let z = Complex::zero();
    let one = Complex::one();
    let s = Complex::new(T::one() / T::two().sqrt(), T::zero());
    Ok(vec![
        (c.b1, vec![one, z, z, z]),
        (c.b4, vec![z, z, z, one]),
        (c.b2 - c.d, vec![z, -s, s, z]),
        (c.b2 + c.d, vec![z, s, s, z]),
    ])
}

/// `K_{jl} = sqrt(upsilon_j) |psi_j><l|` for all `j, l`: every input is sent to
/// `sum_j upsilon_j |psi_j><psi_j|` times its trace.
///
/// The amplitude belongs to the output eigenvector `j`; with it on the input
/// label `l` (or with unnormalised `psi_j`) the set is neither trace preserving
/// nor does it reproduce the fixed point.
pub fn fixed_point_kraus<T: Real>(spectrum: &[(T, CVector<T>)]) -> Result<KrausSet<T>> {
    let mut operators = Vec::with_capacity(spectrum.len() * DIM);
    for (upsilon, psi) in spectrum {
        if *upsilon < -T::lit(CP_TOL) {
            return Err(Error::NotCompletelyPositive { eigenvalue: upsilon.to_f64_lossy() });
        }
        let amp = upsilon.max(T::zero()).sqrt();
        for l in 0..DIM {
            let mut bra = vec![Complex::zero(); DIM];
            bra[l] = Complex::one();
            operators.push(CMatrix::outer(psi, &bra).scale(amp));
        }
    }
    KrausSet::new(operators)
}

/// The four stationary Kraus operators of the purely global zero-temperature map
/// (the third is the zero matrix).
pub fn pure_global_stationary_kraus<T: Real>() -> KrausSet<T> {
    let h = T::half();
    let mut k1 = CMatrix::zeros(DIM, DIM);
    k1[(1, 1)] = Complex::new(h, T::zero());
    k1[(1, 2)] = Complex::new(-h, T::zero());
    k1[(2, 1)] = Complex::new(-h, T::zero());
    k1[(2, 2)] = Complex::new(h, T::zero());
    k1[(3, 3)] = Complex::one();
    let k2 = CMatrix::unit(DIM, 3, 0);
    let k3 = CMatrix::zeros(DIM, DIM);
    let r = Complex::new(T::one() / T::two().sqrt(), T::zero());
    let mut k4 = CMatrix::zeros(DIM, DIM);
    k4[(3, 1)] = r;
    k4[(3, 2)] = r;
    KrausSet::new(vec![k1, k2, k3, k4]).expect("fixed 4x4 operators")
}

/// Kraus set of the stationary map `rho(0) -> rho(infinity)` in either regime.
pub fn stationary_kraus<T: Real>(p: &ModelParams<T>) -> Result<KrausSet<T>> {
    if p.is_degenerate() {
        Ok(pure_global_stationary_kraus())
    } else {
        fixed_point_kraus(&fixed_point_spectrum(p)?)
    }
}

/// How `Upsilon(t)` is read in the closed-form `Lambda`, `Xi` amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpsilonMode {
    /// `Upsilon = 16t^2 - 8 e^{4t} t + 8t - 32 e^{2t} + 14 e^{4t} + e^{8t} + 17`.
    Polynomial,
    /// `Upsilon = sqrt` of that polynomial.
    SqrtPolynomial,
}

/// Which expression is used for the `Xi` amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiForm {
    /// `Xi± = (e^{-2t} - 1) sqrt(Theta ± Upsilon) / (sqrt 2 Upsilon Lambda±)`.
    AsPrinted,
    /// `Xi± = ± e^{-2t} sqrt(Theta ± Upsilon) sqrt(Upsilon ± e^{4t} A6) / (2 sqrt(2 Upsilon))`,
    /// from diagonalising the 2x2 Gram block of the Choi matrix.
    Rederived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AnalyticKrausConvention {
    pub upsilon: UpsilonMode,
    pub xi: XiForm,
}

impl AnalyticKrausConvention {
    /// The only combination that yields a CPTP set reproducing the map.
    pub const ACCEPTED: Self = Self { upsilon: UpsilonMode::SqrtPolynomial, xi: XiForm::Rederived };

    pub const ALL: [Self; 4] = [
        Self { upsilon: UpsilonMode::Polynomial, xi: XiForm::AsPrinted },
        Self { upsilon: UpsilonMode::Polynomial, xi: XiForm::Rederived },
        Self { upsilon: UpsilonMode::SqrtPolynomial, xi: XiForm::AsPrinted },
        Self { upsilon: UpsilonMode::SqrtPolynomial, xi: XiForm::Rederived },
    ];
}

impl Default for AnalyticKrausConvention {
    fn default() -> Self {
        Self::ACCEPTED
    }
}

impl fmt::Display for AnalyticKrausConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = match self.upsilon {
            UpsilonMode::Polynomial => "polynomial",
            UpsilonMode::SqrtPolynomial => "sqrt-polynomial",
        };
        let x = match self.xi {
            XiForm::AsPrinted => "as-printed",
            XiForm::Rederived => "rederived",
        };
        write!(f, "upsilon={u}, xi={x}")
    }
}

/// `Theta(t) = -1 + e^{4t} + 4t`.
pub fn theta<T: Real>(t: T) -> T {
    (T::lit(4.0) * t).exp_m1() + T::lit(4.0) * t
}

/// The polynomial `16t^2 - 8 e^{4t} t + 8t - 32 e^{2t} + 14 e^{4t} + e^{8t} + 17`, term by term.
pub fn upsilon_polynomial<T: Real>(t: T) -> T {
    let l = T::lit;
    let e2 = (l(2.0) * t).exp();
    let e4 = (l(4.0) * t).exp();
    let e8 = (l(8.0) * t).exp();
    l(16.0) * t * t - l(8.0) * e4 * t + l(8.0) * t - l(32.0) * e2 + l(14.0) * e4 + e8 + l(17.0)
}

/// Closed-form time-`t` Kraus operators `K1''(t)..K4''(t)` of the purely global
/// zero-temperature map under the chosen convention.
///
/// The set is checked before it is returned: a completeness residual or a
/// channel mismatch (against the closed-form propagator's Choi matrix) above
/// `1e-6` is reported as [`Error::AnalyticKrausRejected`].
pub fn analytic_kraus_t<T: Real>(t: T, convention: AnalyticKrausConvention) -> Result<KrausSet<T>> {
    let set = analytic_kraus_unchecked(t, convention)?;
    let reference = choi_matrix_pure_global_analytic(t)?;
    let completeness = set.completeness_residual();
    let channel_distance = set.choi().max_abs_diff(&reference);
    let tol = T::lit(ANALYTIC_ACCEPT_TOL);
    if !(completeness <= tol && channel_distance <= tol) {
        return Err(Error::AnalyticKrausRejected {
            t: t.to_f64_lossy(),
            convention: convention.to_string(),
            completeness: completeness.to_f64_lossy(),
            channel_distance: channel_distance.to_f64_lossy(),
        });
    }
    Ok(set)
}

/// As [`analytic_kraus_t`] without the final CPTP/channel check.
pub fn analytic_kraus_unchecked<T: Real>(t: T, convention: AnalyticKrausConvention) -> Result<KrausSet<T>> {
    let c = analytic_coefficients(t)?;
    let re = |x: T| Complex::new(x, T::zero());
    let mut k1 = CMatrix::zeros(DIM, DIM);
    k1[(0, 0)] = re(c.a(1));
    k1[(1, 1)] = re(c.a(9));
    k1[(1, 2)] = re(c.a(10));
    k1[(2, 1)] = re(c.a(10));
    k1[(2, 2)] = re(c.a(9));
    k1[(3, 3)] = Complex::one();
    let mut k2 = CMatrix::zeros(DIM, DIM);
    k2[(3, 0)] = re(c.a(6).max(T::zero()).sqrt());

    if t.is_zero() {
        // Lambda and Xi are 0/0 at t = 0; their limit is zero.
        return KrausSet::new(vec![k1, k2, CMatrix::zeros(DIM, DIM), CMatrix::zeros(DIM, DIM)]);
    }

    let l = T::lit;
    let label = convention.to_string();
    let radicand_error = |quantity: &'static str, value: T| Error::NegativeRadicand {
        quantity,
        value: value.to_f64_lossy(),
        t: t.to_f64_lossy(),
        convention: label.clone(),
    };
    let th = theta(t);
    // e^{4t} A6 = e^{4t} - 1 - 4t and e^{2t} - 1, the Gram block entries scaled by e^{4t}.
    let shifted_a6 = (l(4.0) * t).exp_m1() - l(4.0) * t;
    let offdiag = (l(2.0) * t).exp_m1();
    let gram_det = t * (l(4.0) * t).exp_m1() - offdiag * offdiag;

    let (upsilon, theta_pm, upsilon_pm) = match convention.upsilon {
        UpsilonMode::Polynomial => {
            let u = upsilon_polynomial(t);
            (u, [th + u, th - u], [u + shifted_a6, u - shifted_a6])
        }
        UpsilonMode::SqrtPolynomial => {
            // sqrt(polynomial) = hypot(e^{4t} A6, 4(e^{2t} - 1)); differences via exact identities.
            let u = shifted_a6.hypot(l(4.0) * offdiag);
            let plus = th + u;
            let up_plus = u + shifted_a6;
            (u, [plus, l(16.0) * gram_det / plus], [up_plus, l(16.0) * offdiag * offdiag / up_plus])
        }
    };

    let decay = -(-T::two() * t).exp_m1();
    let mut extra = Vec::with_capacity(2);
    for (branch, sign) in [T::one(), -T::one()].into_iter().enumerate() {
        let rad = theta_pm[branch];
        if rad < T::zero() {
            return Err(radicand_error(if branch == 0 { "Theta + Upsilon" } else { "Theta - Upsilon" }, rad));
        }
        let denom = upsilon * upsilon_pm[branch];
        if denom < T::zero() {
            return Err(radicand_error(
                if branch == 0 { "Upsilon (Upsilon + e^{4t} A6)" } else { "Upsilon (Upsilon - e^{4t} A6)" },
                denom,
            ));
        }
        let lambda = T::two().sqrt() * decay * rad.sqrt() / denom.sqrt();
        let xi = match convention.xi {
            XiForm::AsPrinted => -decay * rad.sqrt() / (T::two().sqrt() * upsilon * lambda),
            XiForm::Rederived => {
                sign * (-T::two() * t).exp() * rad.sqrt() * upsilon_pm[branch].sqrt() / (T::two() * (T::two() * upsilon).sqrt())
            }
        };
        let mut k = CMatrix::zeros(DIM, DIM);
        k[(1, 0)] = re(lambda);
        k[(2, 0)] = re(lambda);
        k[(3, 1)] = re(xi);
        k[(3, 2)] = re(xi);
        extra.push(k);
    }
    let [k3, k4]: [CMatrix<T>; 2] = extra.try_into().expect("two branches");
    for k in [&k3, &k4] {
        if !k.as_slice().iter().all(|z| z.re.is_finite()) {
            return Err(Error::AnalyticKrausRejected {
                t: t.to_f64_lossy(),
                convention: label,
                completeness: f64::NAN,
                channel_distance: f64::NAN,
            });
        }
    }
    KrausSet::new(vec![k1, k2, k3, k4])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve;
    use crate::model::BasisLabel;
    use crate::steady::{fixed_point_state, steady_state_closed_form};

    fn p(g: f64, ng: f64, nl: f64) -> ModelParams<f64> {
        ModelParams::new(g, ng, nl).unwrap()
    }

    fn phi_projector() -> CMatrix<f64> {
        let phi: CVector<f64> = (0..VEC_DIM).map(|i| if i % 5 == 0 { Complex::one() } else { Complex::zero() }).collect();
        CMatrix::outer(&phi, &phi)
    }

    #[test]
    fn identity_channel_at_t_zero() {
        let c = choi_matrix(&p(0.4, 0.2, 0.9), 0.0).unwrap();
        assert_eq!(c.matrix(), &phi_projector());
        let eig = hermitian_eig(c.matrix(), 1e-12).unwrap();
        assert!((eig.values[0] - 4.0).abs() < 1e-12);
        assert!(eig.values[1].abs() < 1e-12);
        let k = kraus_from_choi(&c, KRAUS_DROP_TOL).unwrap();
        assert_eq!(k.len(), 1);
        let op = &k.operators()[0];
        let phase = op[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(op.scale_c(phase.conj()).max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn fold_round_trip() {
        let c: CVector<f64> = (0..16).map(|i| Complex::new(i as f64, -(i as f64) / 3.0)).collect();
        let k = fold_segments(&c);
        // Segment 1 (entries 4..8) is column 1.
        assert_eq!(k[(2, 1)], c[6]);
        assert_eq!(unfold_segments(&k), c);
    }

    #[test]
    fn choi_trace_and_positivity() {
        let c = choi_matrix(&p(0.5, 0.1, 0.2), 0.7).unwrap();
        assert!((c.trace() - 4.0).abs() < 1e-9);
        assert!(c.hermiticity_deviation() < 1e-10);
        assert!(c.min_eigenvalue().unwrap() > -1e-9);
        assert!(c.trace_preservation_residual() < 1e-9);
    }

    #[test]
    fn choi_matches_closed_form_entry_pattern() {
        // Nonzero pattern of the purely global Choi matrix. Tokens: "k" -> A_k, "11" -> A1^2,
        // "-8" -> -2 A8, "-5" -> -2 A5, "I" -> 1.
        #[rustfmt::skip]
        let pattern: [[&str; 16]; 16] = [
            ["11","", "", "", "", "7", "8", "", "", "8", "7", "", "", "", "", "1"],
            ["", "2", "2", "", "", "", "", "-8","", "", "", "-8","", "", "", ""],
            ["", "2", "2", "", "", "", "", "-8","", "", "", "-8","", "", "", ""],
            ["", "", "", "6", "", "", "", "", "", "", "", "", "", "", "", ""],
            ["", "", "", "", "", "", "", "", "", "", "", "", "", "", "", ""],
            ["7", "", "", "", "", "3", "5", "", "", "5", "3", "", "", "", "", "9"],
            ["8", "", "", "", "", "5", "4", "", "", "4", "5", "", "", "", "", "10"],
            ["", "-8","-8","", "", "", "", "-5","", "", "", "-5","", "", "", ""],
            ["", "", "", "", "", "", "", "", "", "", "", "", "", "", "", ""],
            ["8", "", "", "", "", "5", "4", "", "", "4", "5", "", "", "", "", "10"],
            ["7", "", "", "", "", "3", "5", "", "", "5", "3", "", "", "", "", "9"],
            ["", "-8","-8","", "", "", "", "-5","", "", "", "-5","", "", "", ""],
            ["", "", "", "", "", "", "", "", "", "", "", "", "", "", "", ""],
            ["", "", "", "", "", "", "", "", "", "", "", "", "", "", "", ""],
            ["", "", "", "", "", "", "", "", "", "", "", "", "", "", "", ""],
            ["1", "", "", "", "", "9", "10","", "", "10","9", "", "", "", "", "I"],
        ];
        let t = 1.0;
        let a = analytic_coefficients(t).unwrap();
        let value = |tok: &str| -> f64 {
            match tok {
                "" => 0.0,
                "I" => 1.0,
                "11" => a.a(1) * a.a(1),
                "-8" => -2.0 * a.a(8),
                "-5" => -2.0 * a.a(5),
                k => a.a(k.parse().unwrap()),
            }
        };
        let numeric = choi_matrix(&ModelParams::pure_global(), t).unwrap();
        let analytic = choi_matrix_pure_global_analytic(t).unwrap();
        for i in 0..16 {
            for j in 0..16 {
                let want = value(pattern[i][j]);
                assert!((numeric.matrix()[(i, j)].re - want).abs() < 1e-9, "numeric ({i},{j})");
                assert!((analytic.matrix()[(i, j)].re - want).abs() < 1e-14, "analytic ({i},{j})");
            }
        }
    }

    #[test]
    fn kraus_from_choi_reproduces_evolution() {
        let q = p(0.6, 0.3, 1.1);
        let t = 0.8;
        let choi = choi_matrix(&q, t).unwrap();
        let kraus = kraus_from_choi(&choi, KRAUS_DROP_TOL).unwrap();
        assert!(kraus.completeness_residual() < 1e-9);
        let generator = build_liouvillian_generic(&q);
        for j in 0..4 {
            for k in 0..4 {
                let unit = CMatrix::unit(4, j, k);
                let direct = propagate_matrix(&generator, &unit, t).unwrap();
                assert!(kraus.apply_matrix(&unit).max_abs_diff(&direct) < 1e-8);
            }
        }
    }

    #[test]
    fn kraus_from_choi_rejects_non_cp() {
        let mut m = phi_projector();
        m[(1, 1)] = Complex::new(-0.1, 0.0);
        let choi = ChoiMatrix::from_matrix(m).unwrap();
        assert!(matches!(kraus_from_choi(&choi, KRAUS_DROP_TOL), Err(Error::NotCompletelyPositive { .. })));
    }

    #[test]
    fn stationary_zero_temperature_is_reset_to_ground() {
        let k = stationary_kraus(&p(0.5, 0.0, 0.0)).unwrap();
        let ground = DensityMatrix::basis(BasisLabel::GroundGround);
        for rho in [DensityMatrix::singlet(), DensityMatrix::basis(BasisLabel::ExcitedExcited), DensityMatrix::maximally_mixed()] {
            assert!(apply_kraus(&k, &rho).max_abs_diff(&ground) < 1e-15);
        }
        assert_eq!(k.nonzero_operators(1e-12).len(), 4);
    }

    #[test]
    fn stationary_unique_regime_maps_to_fixed_point() {
        let q = p(0.5, 0.1, 0.2);
        let k = stationary_kraus(&q).unwrap();
        assert_eq!(k.len(), 16);
        assert!(k.completeness_residual() < 1e-12);
        let fixed = fixed_point_state(&q).unwrap();
        assert!(apply_kraus(&k, &DensityMatrix::singlet()).max_abs_diff(&fixed) < 1e-12);
    }

    #[test]
    fn unnormalised_eigenvectors_break_trace_preservation() {
        let q = p(0.5, 0.1, 0.2);
        let mut spectrum = fixed_point_spectrum(&q).unwrap();
        spectrum[2].1 = vec![Complex::zero(), Complex::new(-1.0, 0.0), Complex::one(), Complex::zero()];
        let k = fixed_point_kraus(&spectrum).unwrap();
        assert!(k.completeness_residual() > 1e-3);
    }

    #[test]
    fn degenerate_stationary_set() {
        let k = pure_global_stationary_kraus::<f64>();
        assert!(k.completeness_residual() < 1e-15);
        let rho2 = DensityMatrix::basis(BasisLabel::ExcitedGround);
        let out = apply_kraus(&k, &rho2);
        let mut want = CMatrix::diagonal(&[0.0, 0.25, 0.25, 0.5]);
        want[(1, 2)] = Complex::new(-0.25, 0.0);
        want[(2, 1)] = Complex::new(-0.25, 0.0);
        assert!(out.matrix().max_abs_diff(&want) < 1e-15);
        let s = DensityMatrix::singlet();
        assert!(apply_kraus(&k, &s).max_abs_diff(&s) < 1e-15);
        let e = DensityMatrix::basis(BasisLabel::ExcitedExcited);
        assert!(apply_kraus(&k, &e).max_abs_diff(&DensityMatrix::basis(BasisLabel::GroundGround)) < 1e-15);
        let closed = steady_state_closed_form(&ModelParams::pure_global(), &rho2).unwrap();
        assert!(out.max_abs_diff(&closed) < 1e-15);
    }

    #[test]
    fn analytic_kraus_identity_at_zero() {
        let k = analytic_kraus_t(0.0f64, AnalyticKrausConvention::ACCEPTED).unwrap();
        assert_eq!(k.operators()[0], CMatrix::identity(4));
        assert!(k.operators()[1..].iter().all(|m| m.max_abs() == 0.0));
    }

    #[test]
    fn analytic_kraus_accepted_convention() {
        for t in [0.1, 0.5, 1.0, 2.0, 5.0, 30.0] {
            let k = analytic_kraus_t(t, AnalyticKrausConvention::ACCEPTED).unwrap();
            assert!(k.completeness_residual() < 1e-8, "t = {t}");
        }
        let k = analytic_kraus_t(1.0, AnalyticKrausConvention::ACCEPTED).unwrap();
        let rho = DensityMatrix::basis(BasisLabel::ExcitedExcited);
        let direct = evolve(&ModelParams::pure_global(), &rho, 1.0).unwrap();
        assert!(apply_kraus(&k, &rho).max_abs_diff(&direct) < 1e-8);
    }

    #[test]
    fn analytic_kraus_other_conventions_are_reported() {
        for convention in AnalyticKrausConvention::ALL {
            if convention == AnalyticKrausConvention::ACCEPTED {
                continue;
            }
            for t in [0.5, 1.0, 2.0] {
                let err = analytic_kraus_t(t, convention).unwrap_err();
                assert!(
                    matches!(err, Error::AnalyticKrausRejected { .. } | Error::NegativeRadicand { .. }),
                    "{convention} at t = {t}: {err}"
                );
            }
        }
    }

    #[test]
    fn analytic_kraus_converges_to_stationary_set() {
        let k = analytic_kraus_t(30.0, AnalyticKrausConvention::ACCEPTED).unwrap();
        let limit = pure_global_stationary_kraus::<f64>();
        // K3''(t) tends to the fourth stationary operator and K4''(t) to the zero one.
        assert!(k.operators()[0].max_abs_diff(&limit.operators()[0]) < 1e-12);
        assert!(k.operators()[1].max_abs_diff(&limit.operators()[1]) < 1e-12);
        assert!(k.operators()[2].max_abs_diff(&limit.operators()[3]) < 1e-12);
        assert!(k.operators()[3].max_abs_diff(&limit.operators()[2]) < 1e-12);
    }
}
