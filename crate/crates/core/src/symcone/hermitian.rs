//! Small dense complex matrices: Hermitian storage, a Jacobi eigensolver,
//! and the Cholesky factor used to take eigenvalues relative to a metric.

use num_complex::Complex64;

use super::SymconeError;

/// Largest matrix dimension handled by the pointwise kernels.
pub const MAX_DIM: usize = 6;
const CAP: usize = MAX_DIM * MAX_DIM;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance for accepting user input as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-14;
/// Off-diagonal stopping threshold for the Jacobi sweeps, relative to ‖A‖_F.
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Row-major square complex matrix of dimension at most [`MAX_DIM`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMatrix {
    n: usize,
    data: [Complex64; CAP],
}

impl SmallMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Self { n, data: [ZERO; CAP] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * MAX_DIM + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * MAX_DIM + j] = v;
    }

    pub fn mul(&self, other: &SmallMatrix) -> SmallMatrix {
        let n = self.n;
        SmallMatrix::from_fn(n, |i, j| (0..n).map(|l| self.get(i, l) * other.get(l, j)).sum())
    }

    pub fn adjoint(&self) -> SmallMatrix {
        SmallMatrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = *self;
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a.get(x, col).norm().total_cmp(&a.get(y, col).norm()))
                .unwrap_or(col);
            let p = a.get(pivot, col);
            if p.norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(col, j);
                    a.set(col, j, a.get(pivot, j));
                    a.set(pivot, j, tmp);
                }
                det = -det;
            }
            det *= p;
            for row in col + 1..n {
                let factor = a.get(row, col) / p;
                for j in col..n {
                    let v = a.get(row, j) - factor * a.get(col, j);
                    a.set(row, j, v);
                }
            }
        }
        det
    }

    /// Principal submatrix on the listed rows/columns.
    pub fn principal(&self, idx: &[usize]) -> SmallMatrix {
        SmallMatrix::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }
}

/// An n×n Hermitian matrix, n ≤ [`MAX_DIM`].
///
/// Storage is exactly Hermitian: constructors symmetrize their input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: SmallMatrix,
}

impl HermitianMatrix {
    /// Validates `entries` (row-major, length n²) and symmetrizes.
    pub fn new(n: usize, entries: &[Complex64]) -> Result<Self, SymconeError> {
        if n == 0 || n > MAX_DIM {
            return Err(SymconeError::Dimension { n, max: MAX_DIM });
        }
        if entries.len() != n * n {
            return Err(SymconeError::Shape { expected: n * n, got: entries.len() });
        }
        let m = SmallMatrix::from_fn(n, |i, j| entries[i * n + j]);
        Self::from_matrix(&m)
    }

    /// Validates that `m` is Hermitian to [`HERMITIAN_TOL`] (relative).
    pub fn from_matrix(m: &SmallMatrix) -> Result<Self, SymconeError> {
        let n = m.dim();
        let mut scale: f64 = 0.0;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = m.get(i, j);
                if !a.re.is_finite() || !a.im.is_finite() {
                    return Err(SymconeError::NonFinite);
                }
                scale = scale.max(a.norm());
                dev = dev.max((a - m.get(j, i).conj()).norm());
            }
        }
        if dev > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) && dev > 0.0 {
            return Err(SymconeError::NotHermitian { deviation: dev / scale.max(f64::MIN_POSITIVE) });
        }
        Ok(Self::symmetrized(m))
    }

    /// Hermitian part `(m + m†)/2`, without validation.
    pub fn symmetrized(m: &SmallMatrix) -> Self {
        let n = m.dim();
        let mut out = SmallMatrix::zeros(n);
        for i in 0..n {
            out.set(i, i, Complex64::new(m.get(i, i).re, 0.0));
            for j in i + 1..n {
                let v = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
                out.set(i, j, v);
                out.set(j, i, v.conj());
            }
        }
        Self { inner: out }
    }

    pub fn zeros(n: usize) -> Self {
        Self { inner: SmallMatrix::zeros(n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: SmallMatrix::identity(n) }
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = SmallMatrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        Self { inner: m }
    }

    /// Builds from the upper triangle; the lower triangle is its conjugate.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = SmallMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(upper(i, i).re, 0.0));
            for j in i + 1..n {
                let v = upper(i, j);
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        Self { inner: m }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &SmallMatrix {
        &self.inner
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = *self;
        for v in out.inner.data.iter_mut() {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        assert_eq!(self.dim(), other.dim());
        let mut out = *self;
        for (a, b) in out.inner.data.iter_mut().zip(other.inner.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.get(i, j).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Real trace pairing `tr(self · other)`.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.get(i, j) * other.get(j, i)).re;
            }
        }
        s
    }

    /// `S self S†` for an arbitrary square `S`.
    pub fn congruence(&self, s: &SmallMatrix) -> HermitianMatrix {
        HermitianMatrix::symmetrized(&s.mul(&self.inner).mul(&s.adjoint()))
    }

    /// Eigen-decomposition with eigenvalues sorted descending.
    pub fn eigen(&self) -> EigenDecomposition {
        jacobi_eigen(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().values().to_vec()
    }

    /// Complex Cholesky factor `L` with `self = L L†`, if positive definite.
    pub fn cholesky(&self) -> Option<SmallMatrix> {
        let n = self.dim();
        let mut l = SmallMatrix::zeros(n);
        for j in 0..n {
            let mut d = self.get(j, j).re;
            for p in 0..j {
                d -= l.get(j, p).norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let djj = d.sqrt();
            l.set(j, j, Complex64::new(djj, 0.0));
            for i in j + 1..n {
                let mut v = self.get(i, j);
                for p in 0..j {
                    v -= l.get(i, p) * l.get(j, p).conj();
                }
                l.set(i, j, v / djj);
            }
        }
        Some(l)
    }
}

/// Eigenpairs of a Hermitian matrix. Column `i` of the vector matrix pairs
/// with `values()[i]`; values are sorted descending.
#[derive(Clone, Copy, Debug)]
pub struct EigenDecomposition {
    n: usize,
    values: [f64; MAX_DIM],
    vectors: SmallMatrix,
}

impl EigenDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.n]
    }

    pub fn vectors(&self) -> &SmallMatrix {
        &self.vectors
    }

    /// `V diag(weights) V†`.
    pub fn reassemble(&self, weights: &[f64]) -> HermitianMatrix {
        let n = self.n;
        let v = &self.vectors;
        HermitianMatrix::from_upper(n, |i, j| {
            (0..n).map(|c| v.get(i, c) * v.get(j, c).conj() * weights[c]).sum()
        })
    }
}

fn off_diagonal_sq(a: &SmallMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s
}

/// Cyclic complex Jacobi. For n = 2 one rotation diagonalizes exactly, which
/// is the closed form.
fn jacobi_eigen(h: &HermitianMatrix) -> EigenDecomposition {
    let n = h.dim();
    let mut a = *h.as_matrix();
    let mut v = SmallMatrix::identity(n);
    let total = h.frobenius_norm();
    let stop = (JACOBI_TOL * total).powi(2);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_sq(&a) <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let mut order: [usize; MAX_DIM] = [0, 1, 2, 3, 4, 5];
    order[..n].sort_by(|&x, &y| a.get(y, y).re.total_cmp(&a.get(x, x).re));
    let mut values = [0.0; MAX_DIM];
    let mut vectors = SmallMatrix::zeros(n);
    for (dst, &src) in order[..n].iter().enumerate() {
        values[dst] = a.get(src, src).re;
        for r in 0..n {
            vectors.set(r, dst, v.get(r, src));
        }
    }
    EigenDecomposition { n, values, vectors }
}

/// Annihilates `a[p][q]` with the unitary `D R`, where `D` removes the phase
/// of the pivot and `R` is the real symmetric Jacobi rotation.
fn rotate(a: &mut SmallMatrix, v: &mut SmallMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let phase = apq / r; // e^{iθ}
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = [[c, s], [-s e^{-iθ}, c e^{-iθ}]] on the (p, q) plane
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;
    let n = a.dim();
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * upp + akq * uqp);
        a.set(k, q, akp * upq + akq * uqq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, upp.conj() * apk + uqp.conj() * aqk);
        a.set(q, k, upq.conj() * apk + uqq.conj() * aqk);
    }
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * upp + vkq * uqp);
        v.set(k, q, vkp * upq + vkq * uqq);
    }
}

/// Inverse Cholesky factor of a Hermitian metric, used to reduce the pencil
/// `(A, α)` to the ordinary Hermitian matrix `L⁻¹ A L⁻†`.
#[derive(Clone, Copy, Debug)]
pub struct MetricFactor {
    inv: Option<SmallMatrix>,
    n: usize,
}

impl MetricFactor {
    pub fn new(alpha: &HermitianMatrix) -> Result<Self, SymconeError> {
        let n = alpha.dim();
        if *alpha == HermitianMatrix::identity(n) {
            return Ok(Self { inv: None, n });
        }
        let l = alpha.cholesky().ok_or(SymconeError::NotPositiveDefinite)?;
        Ok(Self { inv: Some(lower_inverse(&l)), n })
    }

    pub fn identity(n: usize) -> Self {
        Self { inv: None, n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `L⁻¹ A L⁻†`, whose eigenvalues are those of `α⁻¹ A`.
    pub fn reduce(&self, a: &HermitianMatrix) -> HermitianMatrix {
        match &self.inv {
            None => *a,
            Some(li) => a.congruence(li),
        }
    }

    /// `L⁻† G L⁻¹`: maps a gradient with respect to the reduced matrix back
    /// to a gradient with respect to `A`.
    pub fn pull_back(&self, g: &HermitianMatrix) -> HermitianMatrix {
        match &self.inv {
            None => *g,
            Some(li) => g.congruence(&li.adjoint()),
        }
    }

    /// `α⁻¹` as a Hermitian matrix.
    pub fn inverse_metric(&self) -> HermitianMatrix {
        self.pull_back(&HermitianMatrix::identity(self.n))
    }
}

fn lower_inverse(l: &SmallMatrix) -> SmallMatrix {
    let n = l.dim();
    let mut inv = SmallMatrix::zeros(n);
    for col in 0..n {
        for row in col..n {
            let mut s = if row == col { ONE } else { ZERO };
            for p in col..row {
                s -= l.get(row, p) * inv.get(p, col);
            }
            inv.set(row, col, s / l.get(row, row));
        }
    }
    inv
}
