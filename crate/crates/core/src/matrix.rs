//! Dense square complex matrices sized for single- and two-qubit operators.
//!
//! Storage is row-major. Everything here is a pure function of its inputs;
//! the decompositions are written for dimensions up to 4 but do not depend
//! on that beyond iteration budgets.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `|a_ij - conj(a_ji)|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues above `-PSD_TOL` are treated as non-negative and clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const QR_ITERS_PER_EIGENVALUE: usize = 60;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

/// Which factor of a bipartite operator survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues and the matching
/// orthonormal eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; panics unless `data.len()` is a
    /// perfect square.
    pub fn from_vec(data: Vec<C64>) -> Self {
        let dim = (data.len() as f64).sqrt().round() as usize;
        assert!(dim > 0 && dim * dim == data.len(), "entry count is not a square");
        Self { dim, data }
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.into_iter().flatten().map(re).collect(),
        }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = re(*v);
        }
        m
    }

    /// `|ψ⟩⟨φ|`.
    pub fn outer(psi: &[C64], phi: &[C64]) -> Self {
        assert_eq!(psi.len(), phi.len());
        let dim = psi.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = psi[i] * phi[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Elementwise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.dagger()
    }

    /// Maximum absolute column sum.
    pub fn l1_norm(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn partial_trace(&self, dims: (usize, usize), keep: Keep) -> Result<Self> {
        let (da, db) = dims;
        if da * db != self.dim {
            return Err(Error::DimensionMismatch {
                expected: da * db,
                found: self.dim,
            });
        }
        let out = match keep {
            Keep::First => {
                let mut out = Self::zeros(da);
                for i in 0..da {
                    for j in 0..da {
                        out[(i, j)] = (0..db).map(|k| self[(i * db + k, j * db + k)]).sum();
                    }
                }
                out
            }
            Keep::Second => {
                let mut out = Self::zeros(db);
                for i in 0..db {
                    for j in 0..db {
                        out[(i, j)] = (0..da).map(|k| self[(k * db + i, k * db + j)]).sum();
                    }
                }
                out
            }
        };
        Ok(out)
    }

    /// Spectral decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations.
    pub fn eig_hermitian(&self) -> Result<HermitianEigen> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let n = self.dim;
        // Symmetrize so the rotations act on an exactly Hermitian matrix.
        let mut a = self.clone();
        for i in 0..n {
            a[(i, i)] = re(a[(i, i)].re);
            for j in i + 1..n {
                let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = z;
                a[(j, i)] = z.conj();
            }
        }
        let mut v = Self::identity(n);
        let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        for _ in 0..JACOBI_MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-17 * scale.max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    let phase = apq / r;
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = t * cs;
                    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] on (p, q).
                    let gpp = re(cs);
                    let gpq = re(sn);
                    let gqp = -phase.conj() * sn;
                    let gqq = phase.conj() * cs;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * gpp + akq * gqp;
                        a[(k, q)] = akp * gpq + akq * gqq;
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * gpp + vkq * gqp;
                        v[(k, q)] = vkp * gpq + vkq * gqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                    }
                    a[(p, q)] = re(0.0);
                    a[(q, p)] = re(0.0);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vectors = Self::zeros(n);
        for (col, &src) in order.iter().enumerate() {
            for row in 0..n {
                vectors[(row, col)] = v[(row, src)];
            }
        }
        Ok(HermitianEigen { values, vectors })
    }

    /// Principal square root of a positive semidefinite matrix.
    pub fn psd_sqrt(&self) -> Result<Self> {
        let eig = self.eig_hermitian()?;
        let min = eig.values[0];
        if min < -PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        let roots: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
        Ok(eig.reconstruct_with(&roots))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig_hermitian()?.values[0])
    }

    /// All eigenvalues of a general complex matrix, counted with multiplicity.
    ///
    /// Householder reduction to Hessenberg form followed by single-shift QR
    /// with Wilkinson shifts and deflation.
    pub fn eigvals_general(&self) -> Result<Vec<C64>> {
        let n = self.dim;
        let mut h = self.clone();
        hessenberg_in_place(&mut h);

        let mut eigs = vec![C64::new(0.0, 0.0); n];
        let mut hi = n - 1;
        let mut iter = 0usize;
        let mut total = 0usize;
        let budget = QR_ITERS_PER_EIGENVALUE * n;
        loop {
            if hi == 0 {
                eigs[0] = h[(0, 0)];
                break;
            }
            // Locate the start of the unreduced trailing block.
            let mut lo = hi;
            while lo > 0 {
                let sub = h[(lo, lo - 1)].norm();
                let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
                if sub <= f64::EPSILON * diag || sub < 1e-300 {
                    h[(lo, lo - 1)] = re(0.0);
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                eigs[hi] = h[(hi, hi)];
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total += 1;
            if total > budget {
                return Err(Error::NoConvergence {
                    matrix: Box::new(self.clone()),
                });
            }
            let shift = if iter % 11 == 0 {
                // Exceptional shift to break cycles.
                h[(hi, hi)] + re(h[(hi, hi - 1)].norm())
            } else {
                wilkinson_shift(
                    h[(hi - 1, hi - 1)],
                    h[(hi - 1, hi)],
                    h[(hi, hi - 1)],
                    h[(hi, hi)],
                )
            };
            qr_step(&mut h, lo, hi, shift);
        }
        Ok(eigs)
    }
}

impl HermitianEigen {
    /// `Σ f_k v_k v_k†` for replacement eigenvalues `f`.
    pub fn reconstruct_with(&self, values: &[f64]) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in values.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * lam;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Complex Givens rotation `[[c, s], [-conj(s), c]]` (real `c`) zeroing `y`
/// in `(x, y)`.
fn givens(x: C64, y: C64) -> (f64, C64) {
    let ax = x.norm();
    let r = (ax * ax + y.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, re(0.0));
    }
    if ax == 0.0 {
        return (0.0, re(1.0));
    }
    (ax / r, (x / ax) * y.conj() / r)
}

fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * cs + sn * y;
            h[(k + 1, j)] = -sn.conj() * x + y * cs;
        }
        rots.push((cs, sn));
    }
    for (offset, &(cs, sn)) in rots.iter().enumerate() {
        let k = lo + offset;
        let last = (k + 2).min(hi);
        for i in lo..=last {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * cs + y * sn.conj();
            h[(i, k + 1)] = -x * sn + y * cs;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

fn hessenberg_in_place(h: &mut ComplexMatrix) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { re(1.0) };
        let mut v = x;
        v[0] += phase * norm_x;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H ← (I - 2vv†) H (I - 2vv†) on the trailing block.
        for j in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * dot * 2.0;
            }
        }
        for i in 0..n {
            let dot: C64 = v
                .iter()
                .enumerate()
                .map(|(j, vj)| h[(i, k + 1 + j)] * vj)
                .sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= dot * vj.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = re(0.0);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows([[re(0.0), c(0.0, -1.0)], [c(0.0, 1.0), re(0.0)]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]])
}
