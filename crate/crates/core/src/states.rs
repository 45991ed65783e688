//! Validated quantum states, Bloch-sphere maps and the angle
//! parametrizations searched by the optimizers.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{c, pauli_x, pauli_y, pauli_z, re, ComplexMatrix, C64, HERMITIAN_TOL, PSD_TOL};

/// Tolerance on normalization and unit trace.
pub const NORM_TOL: f64 = 1e-10;

/// The seedable generator used by every stochastic routine.
pub type Stream = ChaCha8Rng;

/// Independent sub-stream `index` of the base `seed`.
///
/// Streams for distinct indices never overlap, so work split across tasks
/// reproduces the sequential result regardless of schedule.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mixes a base seed with integer labels into a new seed (splitmix64
/// finalizer per label).
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(seed, |acc, &label| {
        let mut z = acc ^ label.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if !matches!(amplitudes.len(), 2 | 4) {
            return Err(Error::InvalidState(format!(
                "pure states live in dimension 2 or 4, got {}",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        let mut amps = vec![re(0.0); dim];
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} >= {dim}")));
        }
        amps[index] = re(1.0);
        Self::new(amps)
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: vec![re(s), re(0.0), re(0.0), re(s)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::trusted(self.projector())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = matrix.min_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is a density matrix by construction (channel
    /// outputs, projectors).
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Re-runs the constructor checks; used by property tests on outputs
    /// that skipped validation.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::trusted(self.matrix.kron(&other.matrix))
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::trusted(self.matrix.conjugate_by(u))
    }

    /// Convex combination `t·self + (1-t)·other`.
    pub fn mix(&self, other: &Self, t: f64) -> Self {
        Self::trusted(&self.matrix.scale_real(t) + &other.matrix.scale_real(1.0 - t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let len2 = x * x + y * y + z * z;
        if len2 > 1.0 + NORM_TOL {
            return Err(Error::InvalidState(format!("Bloch vector length² {len2} exceeds 1")));
        }
        Ok(Self { x, y, z })
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Unit vector at polar angle `theta` and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }
}

/// Euler angles of a single-qubit unitary, global phase dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryAngles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl UnitaryAngles {
    pub const IDENTITY: Self = Self {
        theta: 0.0,
        phi: 0.0,
        lambda: 0.0,
    };

    pub fn new(theta: f64, phi: f64, lambda: f64) -> Self {
        Self { theta, phi, lambda }
    }

    pub fn from_slice(params: &[f64]) -> Result<Self> {
        match params {
            [theta, phi, lambda] => Ok(Self::new(*theta, *phi, *lambda)),
            _ => Err(Error::ParameterCount {
                expected: 3,
                found: params.len(),
            }),
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta, self.phi, self.lambda]
    }

    pub fn matrix(&self) -> ComplexMatrix {
        unitary_from_angles(*self)
    }

    /// Angles of a qubit unitary, up to its global phase.
    pub fn from_matrix(u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: u.dim(),
            });
        }
        let (a, b) = (u[(0, 0)], u[(1, 0)]);
        let theta = 2.0 * b.norm().atan2(a.norm());
        // Strip the global phase through u00, which the angles keep real.
        // When u00 vanishes only φ + λ matters, so all of it goes into λ.
        let (phase, phi) = if a.norm() > 1e-14 {
            (a.conj() / a.norm(), b.arg() - a.arg())
        } else {
            (b.conj() / b.norm(), 0.0)
        };
        // λ from whichever of u01 = −e^{iλ}s and u11 = e^{i(φ+λ)}c is larger.
        let (top, bottom) = (u[(0, 1)] * phase, u[(1, 1)] * phase);
        let lambda = if top.norm() >= bottom.norm() {
            (-top).arg()
        } else {
            bottom.arg() - phi
        };
        Ok(Self::new(theta, phi, lambda))
    }
}

/// `[[cos(θ/2), -e^{iλ} sin(θ/2)], [e^{iφ} sin(θ/2), e^{i(φ+λ)} cos(θ/2)]]`.
pub fn unitary_from_angles(angles: UnitaryAngles) -> ComplexMatrix {
    let (s, co) = (angles.theta / 2.0).sin_cos();
    let e = |a: f64| C64::from_polar(1.0, a);
    ComplexMatrix::from_rows([
        [re(co), -e(angles.lambda) * s],
        [e(angles.phi) * s, e(angles.phi + angles.lambda) * co],
    ])
}

/// Number of real parameters `pure_from_angles` takes for a dimension.
pub fn pure_param_count(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(2),
        4 => Ok(6),
        _ => Err(Error::InvalidState(format!("unsupported dimension {dim}"))),
    }
}

/// Maps angles onto a pure state with the first nonzero amplitude real and
/// non-negative.
///
/// * dim 2: `(θ, φ)` gives `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
/// * dim 4: `(α1, α2, α3, φ1, φ2, φ3)` gives hyperspherical magnitudes
///   `cos α1`, `sin α1 cos α2`, `sin α1 sin α2 cos α3`, `sin α1 sin α2 sin α3`
///   with relative phases `φk` on amplitudes 1..=3.
pub fn pure_from_angles(params: &[f64], dim: usize) -> Result<PureState> {
    let expected = pure_param_count(dim)?;
    if params.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            found: params.len(),
        });
    }
    let amplitudes = pure_amplitudes(params);
    Ok(PureState { amplitudes })
}

/// Unchecked amplitude map behind [`pure_from_angles`]; the length of
/// `params` selects the dimension (2 → qubit, 6 → two qubits). Angles
/// outside their principal ranges are accepted and the global phase is
/// renormalized afterwards.
pub(crate) fn pure_amplitudes(params: &[f64]) -> Vec<C64> {
    let mut amps = if params.len() == 2 {
        let (s, co) = (params[0] / 2.0).sin_cos();
        vec![re(co), C64::from_polar(s, params[1])]
    } else {
        let (s1, c1) = params[0].sin_cos();
        let (s2, c2) = params[1].sin_cos();
        let (s3, c3) = params[2].sin_cos();
        vec![
            re(c1),
            C64::from_polar(s1 * c2, params[3]),
            C64::from_polar(s1 * s2 * c3, params[4]),
            C64::from_polar(s1 * s2 * s3, params[5]),
        ]
    };
    if let Some(lead) = amps.iter().find(|a| a.norm() > 1e-15).copied() {
        if lead.im != 0.0 || lead.re < 0.0 {
            let phase = lead.conj() / lead.norm();
            for a in amps.iter_mut() {
                *a *= phase;
            }
        }
    }
    amps
}

/// Inverse of [`pure_from_angles`]: angles reproducing `psi` up to a global
/// phase.
pub fn angles_from_pure(psi: &PureState) -> Vec<f64> {
    let a = psi.amplitudes();
    let lead = a.iter().find(|z| z.norm() > 1e-15).map_or(re(1.0), |z| z.conj() / z.norm());
    let a: Vec<C64> = a.iter().map(|z| z * lead).collect();
    if a.len() == 2 {
        return vec![2.0 * a[1].norm().atan2(a[0].norm()), a[1].arg() - a[0].arg()];
    }
    let m: Vec<f64> = a.iter().map(|z| z.norm()).collect();
    let alpha1 = (m[1] * m[1] + m[2] * m[2] + m[3] * m[3]).sqrt().atan2(m[0]);
    let alpha2 = (m[2] * m[2] + m[3] * m[3]).sqrt().atan2(m[1]);
    let alpha3 = m[3].atan2(m[2]);
    let phase = |k: usize| a[k].arg() - a[0].arg();
    vec![alpha1, alpha2, alpha3, phase(1), phase(2), phase(3)]
}

pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    psi.to_density()
}

/// `(I + x σx + y σy + z σz) / 2`.
pub fn bloch_to_density(v: BlochVector) -> DensityMatrix {
    let m = &(&(&ComplexMatrix::identity(2) + &pauli_x().scale_real(v.x))
        + &pauli_y().scale_real(v.y))
        + &pauli_z().scale_real(v.z);
    DensityMatrix::trusted(m.scale_real(0.5))
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let off = m[(0, 1)];
    BlochVector::new(2.0 * off.re, -2.0 * off.im, (m[(0, 0)] - m[(1, 1)]).re)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    c(a, b)
}

/// Haar-random pure state: a normalized complex-Gaussian vector.
pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(psi) = PureState::normalized(v) {
            return psi;
        }
    }
}

/// Haar-random unitary by Gram-Schmidt orthonormalization of a
/// complex-Gaussian matrix. Gram-Schmidt leaves a positive-diagonal `R`,
/// which is the phase fixing that makes `Q` Haar distributed.
pub fn random_unitary_dim<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for q in &cols {
            let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= proj * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// Haar-random single-qubit unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    random_unitary_dim(2, rng)
}

/// Random mixed state `G G† / Tr(G G†)` from a complex-Gaussian `G`.
pub fn random_mixed<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ComplexMatrix::from_vec((0..dim * dim).map(|_| gaussian_complex(rng)).collect());
    let w = &g * &g.dagger();
    let tr = w.trace().re;
    DensityMatrix::trusted(w.scale_real(1.0 / tr))
}

/// Uniform random angles for [`pure_from_angles`] covering the full range.
pub fn random_pure_params<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    match dim {
        2 => vec![rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI)],
        _ => {
            let mut p: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..PI / 2.0)).collect();
            p.extend((0..3).map(|_| rng.random_range(0.0..2.0 * PI)));
            p
        }
    }
}
