//! Dense complex linear algebra for small tensor-product Hilbert spaces.
//!
//! Everything operates on explicitly stored amplitudes: a [`StateVector`] is a
//! dense complex vector, an [`Operator`] a dense square matrix (with a
//! compressed nonzero list built at construction so that applying the many
//! highly sparse coupling operators of a spin model costs `O(nnz)` rather than
//! `O(dim^2)`), and a [`DensityMatrix`] a dense square matrix with no imposed
//! structure. Target dimensions are at most a few thousand, so dense storage
//! wins on simplicity and the nonzero walk recovers the sparse speed where it
//! matters.
//!
//! Conventions used across the crate:
//!
//! * inner products `<v|w>` are conjugate-linear in the **first** argument;
//! * in tensor products the left factor is the *slow* index:
//!   `(v ⊗ w)[i*dim_w + j] = v[i] * w[j]`;
//! * expectation values are always taken with explicit normalization,
//!   `<O>_v = <v|O|v> / <v|v>`, since stochastic trajectories do not preserve
//!   the norm.

use num_complex::Complex64;

use crate::{Error, Result};

/// Shorthand for the complex scalar type used everywhere.
pub type C64 = Complex64;

/// Relative tolerance used by Hermiticity checks: an operator `M` passes when
/// `max |M - M^dag| <= HERMITICITY_RTOL * max |M|`.
pub const HERMITICITY_RTOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Dense complex state vector. The dimension is the amplitude count; values
/// are immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a state from explicit amplitudes. Rejects empty vectors and
    /// non-finite entries.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter("state vector must be non-empty".into()));
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite { context: "state vector amplitudes" });
        }
        Ok(Self { amps })
    }

    /// Computational basis state `|index>` in a `dim`-dimensional space.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 || index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Construction path for internal callers that have already validated the
    /// amplitudes (hot loops check norms every step anyway).
    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amps[i]
    }

    /// Squared Euclidean norm `<v|v>`.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr_slice(&self.amps)
    }

    /// Returns the unit-norm copy of `self`, or [`Error::ZeroNormState`] if
    /// the norm underflows.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n.is_finite() && n > f64::MIN_POSITIVE) {
            return Err(Error::ZeroNormState);
        }
        let s = 1.0 / n.sqrt();
        Ok(Self { amps: self.amps.iter().map(|z| z * s).collect() })
    }
}

pub(crate) fn norm_sqr_slice(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `<v|w>` on raw slices, conjugate-linear in the first argument. Callers
/// guarantee matching lengths.
pub(crate) fn dot_slice(v: &[C64], w: &[C64]) -> C64 {
    debug_assert_eq!(v.len(), w.len());
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

// ---------------------------------------------------------------------------
// Operator
// ---------------------------------------------------------------------------

/// Dense square complex matrix with a compressed sparse row view of its
/// nonzeros, built once at construction and reused by every application.
#[derive(Debug, Clone)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>, // row-major, entries[i * dim + j] = M_ij
    row_ptr: Vec<u32>,
    col: Vec<u32>,
    val: Vec<C64>,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl Operator {
    /// Builds an operator from row-major entries (`entries[i*dim + j] = M_ij`).
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("operator dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
                context: "operator entry count",
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite { context: "operator entries" });
        }
        Ok(Self::from_entries_unchecked(dim, entries))
    }

    fn from_entries_unchecked(dim: usize, entries: Vec<C64>) -> Self {
        // Build the nonzero walk. Exact zeros are common (coupling operators
        // are permutation-like), so this is worth a dim^2 scan at build time.
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        row_ptr.push(0u32);
        for i in 0..dim {
            for j in 0..dim {
                let z = entries[i * dim + j];
                if z.re != 0.0 || z.im != 0.0 {
                    col.push(j as u32);
                    val.push(z);
                }
            }
            row_ptr.push(col.len() as u32);
        }
        Self { dim, entries, row_ptr, col, val }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_entries(dim, vec![C64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self::from_entries(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        Self::from_entries_unchecked(d, out)
    }

    /// Kronecker product with the left factor (self) as the slow index, so
    /// `(A ⊗ B)[(i1*d2+i2), (j1*d2+j2)] = A[i1,j1] * B[i2,j2]`.
    pub fn kron(&self, other: &Self) -> Self {
        let (d1, d2) = (self.dim, other.dim);
        let d = d1 * d2;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                let a = self.entries[i1 * d1 + j1];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for i2 in 0..d2 {
                    for j2 in 0..d2 {
                        let b = other.entries[i2 * d2 + j2];
                        if b.re != 0.0 || b.im != 0.0 {
                            out[(i1 * d2 + i2) * d + (j1 * d2 + j2)] = a * b;
                        }
                    }
                }
            }
        }
        Self::from_entries_unchecked(d, out)
    }

    /// Entry-wise sum; dimensions must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
                context: "operator sum",
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_entries_unchecked(self.dim, entries))
    }

    /// Entry-wise scaling by a complex factor.
    pub fn scaled(&self, factor: C64) -> Self {
        let entries = self.entries.iter().map(|z| z * factor).collect();
        Self::from_entries_unchecked(self.dim, entries)
    }

    /// `self - z * I`, used to center a coupling operator on a state mean.
    pub fn shifted(&self, z: C64) -> Self {
        let mut entries = self.entries.clone();
        for i in 0..self.dim {
            entries[i * self.dim + i] -= z;
        }
        Self::from_entries_unchecked(self.dim, entries)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation from the conjugate transpose,
    /// `max_ij |M_ij - conj(M_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.entries[i * d + j] - self.entries[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Checks `max |M - M^dag| <= HERMITICITY_RTOL * max |M|`.
    pub fn ensure_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        let tolerance = HERMITICITY_RTOL * self.max_abs();
        if deviation > tolerance {
            return Err(Error::NonHermitian { deviation, tolerance });
        }
        Ok(())
    }

    /// Matrix-vector application `M|v>`.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.dim(),
                context: "operator application",
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        self.apply_into(v.amplitudes(), &mut out);
        Ok(StateVector::from_raw(out))
    }

    /// `out = M v` on raw slices (lengths must match `dim`); walks nonzeros.
    pub(crate) fn apply_into(&self, v: &[C64], out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let lo = self.row_ptr[i] as usize;
            let hi = self.row_ptr[i + 1] as usize;
            let mut acc = C64::new(0.0, 0.0);
            for k in lo..hi {
                acc += self.val[k] * v[self.col[k] as usize];
            }
            out[i] = acc;
        }
    }

    /// `out += scale * (M v)` on raw slices; walks nonzeros.
    pub(crate) fn apply_scaled_acc(&self, v: &[C64], scale: C64, out: &mut [C64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for i in 0..self.dim {
            let lo = self.row_ptr[i] as usize;
            let hi = self.row_ptr[i + 1] as usize;
            let mut acc = C64::new(0.0, 0.0);
            for k in lo..hi {
                acc += self.val[k] * v[self.col[k] as usize];
            }
            out[i] += scale * acc;
        }
    }
}

// ---------------------------------------------------------------------------
// Free functions: the operations the rest of the crate is written against
// ---------------------------------------------------------------------------

/// Tensor (Kronecker) product of two states, left factor slow:
/// `(v ⊗ w)[i*dim_w + j] = v[i] * w[j]`.
pub fn tensor_product(v: &StateVector, w: &StateVector) -> StateVector {
    let mut out = Vec::with_capacity(v.dim() * w.dim());
    for a in v.amplitudes() {
        for b in w.amplitudes() {
            out.push(a * b);
        }
    }
    StateVector::from_raw(out)
}

/// `M|v>`; see [`Operator::apply`].
pub fn apply_operator(op: &Operator, v: &StateVector) -> Result<StateVector> {
    op.apply(v)
}

/// `<v|w>`, conjugate-linear in the first argument.
pub fn inner_product(v: &StateVector, w: &StateVector) -> Result<C64> {
    if v.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            actual: w.dim(),
            context: "inner product",
        });
    }
    Ok(dot_slice(v.amplitudes(), w.amplitudes()))
}

/// Normalized expectation value `<v|O|v> / <v|v>`. Errors on zero-norm states
/// rather than returning NaN so trajectory death is an explicit event.
pub fn normalized_expectation(op: &Operator, v: &StateVector) -> Result<C64> {
    let n = v.norm_sqr();
    if !(n.is_finite() && n > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNormState);
    }
    let ov = op.apply(v)?;
    Ok(dot_slice(v.amplitudes(), ov.amplitudes()) / n)
}

/// Normalized second moment `<v|O^dag O|v> / <v|v>`, computed as
/// `|O v|^2 / |v|^2` (no need to form the product operator).
pub fn normalized_second_moment(op: &Operator, v: &StateVector) -> Result<f64> {
    let n = v.norm_sqr();
    if !(n.is_finite() && n > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNormState);
    }
    let ov = op.apply(v)?;
    Ok(ov.norm_sqr() / n)
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Dense density matrix. Ensemble averages of dyadics are generally not
/// Hermitian at finite sampling, so no structure is imposed; consumers check
/// Hermiticity/positivity where the context warrants it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<C64>, // row-major
}

impl DensityMatrix {
    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("density matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
                context: "density matrix entry count",
            });
        }
        Ok(Self { dim, entries })
    }

    pub(crate) fn from_raw(dim: usize, entries: Vec<C64>) -> Self {
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// `max_ij |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let dev = (self.entries[i * d + j] - self.entries[j * d + i].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Real spectrum of the Hermitian part `(rho + rho^dag)/2`, ascending.
    /// Intended for positivity checks on near-Hermitian matrices.
    pub fn eigenvalues(&self) -> Vec<f64> {
        use nalgebra::{Complex, DMatrix};
        let d = self.dim;
        let herm = DMatrix::from_fn(d, d, |i, j| {
            let z = (self.entries[i * d + j] + self.entries[j * d + i].conj()) * 0.5;
            Complex::new(z.re, z.im)
        });
        let mut eig: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        eig
    }

    /// Frobenius-norm purity `Tr(rho^2)` of the Hermitian part, used in tests.
    pub fn purity(&self) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = (self.entries[i * d + j] + self.entries[j * d + i].conj()) * 0.5;
                let b = (self.entries[j * d + i] + self.entries[i * d + j].conj()) * 0.5;
                acc += (a * b).re;
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
