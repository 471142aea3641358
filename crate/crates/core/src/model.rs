//! Physical model: parameters, basis conventions, Lindblad operators and the
//! 16x16 Liouvillian acting on vectorised density matrices.
//!
//! Basis: `|1> = |e1 e2>`, `|2> = |e1 g2>`, `|3> = |g1 e2>`, `|4> = |g1 g2>`.
//! Vectorisation is row-major, `v = (rho11, rho12, ..., rho43, rho44)`; every
//! reshaping in the crate goes through [`vec_index`].

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, CMatrix, CVector};
use crate::scalar::Real;

/// Hilbert-space dimension of the two-qubit system.
pub const DIM: usize = 4;
/// Length of a vectorised density matrix.
pub const VEC_DIM: usize = DIM * DIM;

/// Tolerance used to validate density matrices (Hermiticity, trace, positivity).
pub const STATE_TOL: f64 = 1e-10;

/// Position of `rho_{jk}` (0-based) in the vectorised state.
#[inline]
pub const fn vec_index(j: usize, k: usize) -> usize {
    j * DIM + k
}

/// Bath parameters selecting one member of the dissipative map family.
///
/// The decay rate is fixed to one, so time is dimensionless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", into = "RawParams<T>", bound = "T: Real")]
pub struct ModelParams<T: Real> {
    gamma: T,
    n_g: T,
    n_l: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct RawParams<T: Real> {
    gamma: T,
    n_g: T,
    n_l: T,
}

impl<T: Real> TryFrom<RawParams<T>> for ModelParams<T> {
    type Error = Error;

    fn try_from(raw: RawParams<T>) -> Result<Self> {
        ModelParams::new(raw.gamma, raw.n_g, raw.n_l)
    }
}

impl<T: Real> From<ModelParams<T>> for RawParams<T> {
    fn from(p: ModelParams<T>) -> Self {
        RawParams { gamma: p.gamma, n_g: p.n_g, n_l: p.n_l }
    }
}

impl<T: Real> ModelParams<T> {
    /// `gamma` in `[0, 1]` interpolates local (0) and global (1) dissipation;
    /// `n_g`, `n_l` are the global and local thermal occupations.
    pub fn new(gamma: T, n_g: T, n_l: T) -> Result<Self> {
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} outside [0, 1]")));
        }
        if !(n_g >= T::zero() && n_g.is_finite()) {
            return Err(Error::InvalidParams(format!("n_g = {n_g} must be finite and >= 0")));
        }
        if !(n_l >= T::zero() && n_l.is_finite()) {
            return Err(Error::InvalidParams(format!("n_l = {n_l} must be finite and >= 0")));
        }
        Ok(Self { gamma, n_g, n_l })
    }

    /// The purely global zero-temperature map (`gamma = 1`, `n_g = 0`); `n_l` is irrelevant there.
    pub fn pure_global() -> Self {
        Self { gamma: T::one(), n_g: T::zero(), n_l: T::zero() }
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn n_g(&self) -> T {
        self.n_g
    }

    pub fn n_l(&self) -> T {
        self.n_l
    }

    pub fn with_n_l(self, n_l: T) -> Result<Self> {
        Self::new(self.gamma, self.n_g, n_l)
    }

    /// Exact test for `gamma = 1 and n_g = 0`, where the steady state is not unique.
    pub fn is_degenerate(&self) -> bool {
        self.gamma == T::one() && self.n_g == T::zero()
    }

    /// `xi = gamma n_g + (1 - gamma) n_l`.
    pub fn xi(&self) -> T {
        self.gamma * self.n_g + (T::one() - self.gamma) * self.n_l
    }

    /// `eta = 2 gamma n_g`.
    pub fn eta(&self) -> T {
        T::two() * self.gamma * self.n_g
    }

    /// `chi = 2 gamma (1 + n_g)`.
    pub fn chi(&self) -> T {
        T::two() * self.gamma * (T::one() + self.n_g)
    }

    /// `zeta = -gamma (1 + 2 n_g)`.
    pub fn zeta(&self) -> T {
        -self.gamma * (T::one() + T::two() * self.n_g)
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        ModelParams { gamma: self.gamma.to_f64_lossy(), n_g: self.n_g.to_f64_lossy(), n_l: self.n_l.to_f64_lossy() }
    }
}

/// Single-qubit level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Excited,
    Ground,
}

/// Two-qubit product basis element `|1>..|4>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    /// `|1> = |e1 e2>`
    ExcitedExcited,
    /// `|2> = |e1 g2>`
    ExcitedGround,
    /// `|3> = |g1 e2>`
    GroundExcited,
    /// `|4> = |g1 g2>`
    GroundGround,
}

impl BasisLabel {
    pub const ALL: [BasisLabel; 4] =
        [BasisLabel::ExcitedExcited, BasisLabel::ExcitedGround, BasisLabel::GroundExcited, BasisLabel::GroundGround];

    /// 1-based index.
    pub fn index(self) -> usize {
        match self {
            BasisLabel::ExcitedExcited => 1,
            BasisLabel::ExcitedGround => 2,
            BasisLabel::GroundExcited => 3,
            BasisLabel::GroundGround => 4,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index.checked_sub(1)?).copied()
    }

    pub fn from_levels(first: Level, second: Level) -> Self {
        match (first, second) {
            (Level::Excited, Level::Excited) => BasisLabel::ExcitedExcited,
            (Level::Excited, Level::Ground) => BasisLabel::ExcitedGround,
            (Level::Ground, Level::Excited) => BasisLabel::GroundExcited,
            (Level::Ground, Level::Ground) => BasisLabel::GroundGround,
        }
    }

    pub fn levels(self) -> (Level, Level) {
        match self {
            BasisLabel::ExcitedExcited => (Level::Excited, Level::Excited),
            BasisLabel::ExcitedGround => (Level::Excited, Level::Ground),
            BasisLabel::GroundExcited => (Level::Ground, Level::Excited),
            BasisLabel::GroundGround => (Level::Ground, Level::Ground),
        }
    }

    /// Computational-basis ket.
    pub fn ket<T: Real>(self) -> CVector<T> {
        let mut v = vec![Complex::zero(); DIM];
        v[self.index() - 1] = Complex::one();
        v
    }
}

/// 4x4 density matrix in the [`BasisLabel`] ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CMatrix<T>", into = "CMatrix<T>", bound = "T: Real")]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> TryFrom<CMatrix<T>> for DensityMatrix<T> {
    type Error = Error;

    fn try_from(m: CMatrix<T>) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

impl<T: Real> From<DensityMatrix<T>> for CMatrix<T> {
    fn from(rho: DensityMatrix<T>) -> Self {
        rho.matrix
    }
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate(T::lit(STATE_TOL))?;
        Ok(rho)
    }

    /// Wraps any 4x4 matrix without physical checks (matrix-unit transients are not states).
    pub fn from_matrix_unchecked(matrix: CMatrix<T>) -> Result<Self> {
        if matrix.rows() != DIM || matrix.cols() != DIM {
            return Err(Error::Shape(format!("density matrix must be 4x4, got {}x{}", matrix.rows(), matrix.cols())));
        }
        Ok(Self { matrix })
    }

    pub fn validate(&self, tol: T) -> Result<()> {
        let dev = self.matrix.hermiticity_deviation();
        if dev > tol {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {} + {}i is not 1", tr.re, tr.im)));
        }
        let min_eig = self.min_eigenvalue();
        if min_eig < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    /// Projector onto a (not necessarily normalised) ket, normalised to unit trace.
    pub fn pure(ket: &[Complex<T>]) -> Result<Self> {
        if ket.len() != DIM {
            return Err(Error::Shape(format!("ket of length {}", ket.len())));
        }
        let norm_sqr: T = ket.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sqr > T::zero()) {
            return Err(Error::InvalidState("zero ket".into()));
        }
        Ok(Self { matrix: CMatrix::outer(ket, ket).scale(T::one() / norm_sqr) })
    }

    pub fn basis(label: BasisLabel) -> Self {
        Self { matrix: CMatrix::outer(&label.ket(), &label.ket()) }
    }

    /// `(|e1 g2> - |g1 e2>) / sqrt 2`, the dark state of the zero-temperature global bath.
    pub fn singlet() -> Self {
        let s = T::one() / T::two().sqrt();
        let ket = vec![Complex::zero(), Complex::new(s, T::zero()), Complex::new(-s, T::zero()), Complex::zero()];
        Self { matrix: CMatrix::outer(&ket, &ket) }
    }

    pub fn maximally_mixed() -> Self {
        Self { matrix: CMatrix::identity(DIM).scale(T::quarter()) }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    /// Entry `rho_{jk}` with 1-based indices as in the basis labels.
    pub fn element(&self, j: usize, k: usize) -> Complex<T> {
        self.matrix[(j - 1, k - 1)]
    }

    pub fn min_eigenvalue(&self) -> T {
        // Symmetrised input, so the Hermiticity check cannot fail here.
        let sym = CMatrix::from_fn(DIM, DIM, |i, j| (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * T::half());
        hermitian_eig(&sym, T::infinity()).map(|e| e.values[DIM - 1]).unwrap_or_else(|_| T::nan())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Row-major vectorisation `rho -> (rho11, rho12, ..., rho44)`.
pub fn vectorize<T: Real>(rho: &DensityMatrix<T>) -> CVector<T> {
    vectorize_matrix(rho.matrix())
}

pub fn vectorize_matrix<T: Real>(m: &CMatrix<T>) -> CVector<T> {
    let mut v = vec![Complex::zero(); VEC_DIM];
    for j in 0..DIM {
        for k in 0..DIM {
            v[vec_index(j, k)] = m[(j, k)];
        }
    }
    v
}

/// Inverse of [`vectorize`]. Physical validation runs only when `validate` is set.
pub fn devectorize<T: Real>(v: &[Complex<T>], validate: bool) -> Result<DensityMatrix<T>> {
    let m = devectorize_matrix(v)?;
    if validate {
        DensityMatrix::new(m)
    } else {
        DensityMatrix::from_matrix_unchecked(m)
    }
}

pub fn devectorize_matrix<T: Real>(v: &[Complex<T>]) -> Result<CMatrix<T>> {
    if v.len() != VEC_DIM {
        return Err(Error::Shape(format!("vector of length {} cannot be a 4x4 matrix", v.len())));
    }
    Ok(CMatrix::from_fn(DIM, DIM, |j, k| v[vec_index(j, k)]))
}

/// Lowering operator `sigma_i = |g_i><e_i|` of qubit `i` (1 or 2).
pub fn lowering<T: Real>(qubit: usize) -> CMatrix<T> {
    let mut m = CMatrix::zeros(DIM, DIM);
    for label in BasisLabel::ALL {
        let (a, b) = label.levels();
        let lowered = match (qubit, a, b) {
            (1, Level::Excited, b) => Some(BasisLabel::from_levels(Level::Ground, b)),
            (2, a, Level::Excited) => Some(BasisLabel::from_levels(a, Level::Ground)),
            (1 | 2, _, _) => None,
            _ => panic!("qubit index must be 1 or 2"),
        };
        if let Some(out) = lowered {
            m[(out.index() - 1, label.index() - 1)] = Complex::one();
        }
    }
    m
}

/// A jump operator together with the rate multiplying its dissipator.
#[derive(Debug, Clone)]
pub struct LindbladTerm<T: Real> {
    pub rate: T,
    pub operator: CMatrix<T>,
}

/// The six jump operators: `L1, L2` (global, rate `gamma`) then `L3..L6` (local, rate `1 - gamma`).
pub fn lindblad_operators<T: Real>(p: &ModelParams<T>) -> Vec<LindbladTerm<T>> {
    let s1 = lowering::<T>(1);
    let s2 = lowering::<T>(2);
    let collective = &s1 + &s2;
    let g = p.gamma();
    let local = T::one() - g;
    let up_g = (p.n_g() + T::one()).sqrt();
    let dn_g = p.n_g().sqrt();
    let up_l = (p.n_l() + T::one()).sqrt();
    let dn_l = p.n_l().sqrt();
    vec![
        LindbladTerm { rate: g, operator: collective.scale(up_g) },
        LindbladTerm { rate: g, operator: collective.adjoint().scale(dn_g) },
        LindbladTerm { rate: local, operator: s1.scale(up_l) },
        LindbladTerm { rate: local, operator: s2.scale(up_l) },
        LindbladTerm { rate: local, operator: s1.adjoint().scale(dn_l) },
        LindbladTerm { rate: local, operator: s2.adjoint().scale(dn_l) },
    ]
}

/// Right-hand side of the master equation, `sum_k rate_k (2 L rho L^dag - L^dag L rho - rho L^dag L)`.
pub fn dissipator<T: Real>(terms: &[LindbladTerm<T>], rho: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(DIM, DIM);
    for term in terms {
        let l = &term.operator;
        let ld = l.adjoint();
        let ldl = ld.matmul(l);
        let jump = l.matmul(rho).matmul(&ld).scale(T::two());
        let anti = &ldl.matmul(rho) + &rho.matmul(&ldl);
        out = &out + &(&jump - &anti).scale(term.rate);
    }
    out
}

/// Generator `M` of `v' = M v` on row-major vectorised states. Entries are real.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> Liouvillian<T> {
    /// Wraps a 16x16 real matrix given row-major.
    pub fn from_real(entries: &[T]) -> Result<Self> {
        if entries.len() != VEC_DIM * VEC_DIM {
            return Err(Error::Shape(format!("{} entries for a 16x16 generator", entries.len())));
        }
        let matrix = CMatrix::new(
            VEC_DIM,
            VEC_DIM,
            entries.iter().map(|x| Complex::new(*x, T::zero())).collect(),
        )?;
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Real entry `M[i][j]` (0-based).
    pub fn entry(&self, i: usize, j: usize) -> T {
        self.matrix[(i, j)].re
    }

    pub fn apply(&self, v: &[Complex<T>]) -> CVector<T> {
        self.matrix.matvec(v)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Largest `|sum_j M[d][c]|` over columns `c`, summing the diagonal-coordinate rows `d`.
    /// Zero for trace-preserving generators.
    pub fn trace_preservation_residual(&self) -> T {
        (0..VEC_DIM)
            .map(|c| (0..DIM).map(|j| self.entry(vec_index(j, j), c)).sum::<T>().abs())
            .fold(T::zero(), T::max)
    }

    /// Largest entry of `S M - M S`, with `S` the swap `rho_{jk} <-> rho_{kj}`.
    /// Zero when `M` maps Hermitian states to Hermitian states.
    pub fn hermiticity_swap_residual(&self) -> T {
        let swap = |i: usize| vec_index(i % DIM, i / DIM);
        let mut worst = T::zero();
        for i in 0..VEC_DIM {
            for j in 0..VEC_DIM {
                worst = worst.max((self.entry(swap(i), swap(j)) - self.entry(i, j)).abs());
            }
        }
        worst
    }
}

/// Assembles `M` by applying the master-equation right-hand side to each matrix unit `|j><k|`.
pub fn build_liouvillian_generic<T: Real>(p: &ModelParams<T>) -> Liouvillian<T> {
    let terms = lindblad_operators(p);
    let mut matrix = CMatrix::zeros(VEC_DIM, VEC_DIM);
    for j in 0..DIM {
        for k in 0..DIM {
            let image = dissipator(&terms, &CMatrix::unit(DIM, j, k));
            let col = vectorize_matrix(&image);
            // The generator is real; drop rounding-level imaginary parts.
            let col: CVector<T> = col.into_iter().map(|z| Complex::new(z.re, T::zero())).collect();
            matrix.set_column(vec_index(j, k), &col);
        }
    }
    Liouvillian { matrix }
}

/// Symbol a tabulated block entry is proportional to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    One,
    Xi,
    OnePlusXi,
    Eta,
    Chi,
    Zeta,
}

/// Tabulated block entry `coefficient * symbol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEntry {
    pub coefficient: f64,
    pub symbol: Symbol,
}

impl BlockEntry {
    fn value<T: Real>(&self, p: &ModelParams<T>) -> T {
        let s = match self.symbol {
            Symbol::One => T::one(),
            Symbol::Xi => p.xi(),
            Symbol::OnePlusXi => T::one() + p.xi(),
            Symbol::Eta => p.eta(),
            Symbol::Chi => p.chi(),
            Symbol::Zeta => p.zeta(),
        };
        T::lit(self.coefficient) * s
    }
}

pub type Block = [[BlockEntry; 8]; 8];

/// The four 8x8 blocks of `M`; the diagonal blocks additionally carry `-4 xi I`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedBlocks {
    pub m11: Block,
    pub m12: Block,
    pub m21: Block,
    pub m22: Block,
}

const O: BlockEntry = BlockEntry { coefficient: 0.0, symbol: Symbol::One };
const X2: BlockEntry = BlockEntry { coefficient: 2.0, symbol: Symbol::Xi };
const A2: BlockEntry = BlockEntry { coefficient: 2.0, symbol: Symbol::OnePlusXi };
const ET: BlockEntry = BlockEntry { coefficient: 1.0, symbol: Symbol::Eta };
const CH: BlockEntry = BlockEntry { coefficient: 1.0, symbol: Symbol::Chi };
const ZE: BlockEntry = BlockEntry { coefficient: 1.0, symbol: Symbol::Zeta };

const fn n(c: f64) -> BlockEntry {
    BlockEntry { coefficient: c, symbol: Symbol::One }
}

#[rustfmt::skip]
pub const TABULATED_BLOCKS: TabulatedBlocks = TabulatedBlocks {
    m11: [
        [n(-4.0), O,       O,       O,       O,       X2,      ET,      O      ],
        [O,       n(-3.0), ZE,      O,       O,       O,       O,       ET     ],
        [O,       ZE,      n(-3.0), O,       O,       O,       O,       X2     ],
        [O,       O,       O,       n(-2.0), O,       O,       O,       O      ],
        [O,       O,       O,       O,       n(-3.0), O,       O,       O      ],
        [A2,      O,       O,       O,       O,       n(-2.0), ZE,      O      ],
        [CH,      O,       O,       O,       O,       ZE,      n(-2.0), O      ],
        [O,       CH,      A2,      O,       O,       O,       O,       n(-1.0)],
    ],
    m12: [
        [O,  ET, X2, O,  O, O,  O,  O ],
        [O,  O,  O,  X2, O, O,  O,  O ],
        [O,  O,  O,  ET, O, O,  O,  O ],
        [O,  O,  O,  O,  O, O,  O,  O ],
        [ZE, O,  O,  O,  O, ET, X2, O ],
        [O,  ZE, O,  O,  O, O,  O,  X2],
        [O,  O,  ZE, O,  O, O,  O,  ET],
        [O,  O,  O,  ZE, O, O,  O,  O ],
    ],
    m21: [
        [O,  O,  O,  O, ZE, O,  O,  O ],
        [CH, O,  O,  O, O,  ZE, O,  O ],
        [A2, O,  O,  O, O,  O,  ZE, O ],
        [O,  A2, CH, O, O,  O,  O,  ZE],
        [O,  O,  O,  O, O,  O,  O,  O ],
        [O,  O,  O,  O, CH, O,  O,  O ],
        [O,  O,  O,  O, A2, O,  O,  O ],
        [O,  O,  O,  O, O,  A2, CH, O ],
    ],
    m22: [
        [n(-3.0), O,       O,       O,       O,       X2,      ET,      O],
        [O,       n(-2.0), ZE,      O,       O,       O,       O,       ET],
        [O,       ZE,      n(-2.0), O,       O,       O,       O,       X2],
        [O,       O,       O,       n(-1.0), O,       O,       O,       O],
        [O,       O,       O,       O,       n(-2.0), O,       O,       O],
        [A2,      O,       O,       O,       O,       n(-1.0), ZE,      O],
        [CH,      O,       O,       O,       O,       ZE,      n(-1.0), O],
        [O,       CH,      A2,      O,       O,       O,       O,       O],
    ],
};

/// Assembles `M` from explicit 8x8 blocks, adding `-4 xi` to the diagonal of `M11` and `M22`.
pub fn assemble_tabulated<T: Real>(blocks: &TabulatedBlocks, p: &ModelParams<T>) -> Liouvillian<T> {
    let shift = T::lit(-4.0) * p.xi();
    let mut entries = vec![T::zero(); VEC_DIM * VEC_DIM];
    let placed = [(&blocks.m11, 0, 0, true), (&blocks.m12, 0, 8, false), (&blocks.m21, 8, 0, false), (&blocks.m22, 8, 8, true)];
    for (block, r0, c0, diagonal_shift) in placed {
        for (i, row) in block.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let mut value = e.value(p);
                if diagonal_shift && i == j {
                    value += shift;
                }
                entries[(r0 + i) * VEC_DIM + c0 + j] = value;
            }
        }
    }
    Liouvillian::from_real(&entries).expect("tabulated generator has finite entries")
}

/// Assembles `M` from the tabulated closed-form blocks.
pub fn build_liouvillian_tabulated<T: Real>(p: &ModelParams<T>) -> Liouvillian<T> {
    assemble_tabulated(&TABULATED_BLOCKS, p)
}
