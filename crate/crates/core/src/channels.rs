//! Kraus-operator channels, their two-sided local products, Choi states and
//! covariance diagnostics.
//!
//! All Choi and defect matrices are expressed in the computational product
//! basis `|00⟩, |01⟩, |10⟩, |11⟩`, which fixes the basis-dependent l1 norm.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{pauli_x, pauli_y, pauli_z, re, ComplexMatrix, Keep, C64};
use crate::states::DensityMatrix;

/// Tolerance for `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Single-qubit noise families with a canonical short name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Depolarizing,
    AmplitudeDamping,
    BitFlip,
    PhaseFlip,
    BitPhaseFlip,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Depolarizing,
        Family::AmplitudeDamping,
        Family::BitFlip,
        Family::PhaseFlip,
        Family::BitPhaseFlip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Depolarizing => "dc",
            Family::AmplitudeDamping => "ad",
            Family::BitFlip => "bf",
            Family::PhaseFlip => "pf",
            Family::BitPhaseFlip => "bpf",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Family::Depolarizing => "depolarizing",
            Family::AmplitudeDamping => "amplitude damping",
            Family::BitFlip => "bit flip",
            Family::PhaseFlip => "phase flip",
            Family::BitPhaseFlip => "bit-phase flip",
        }
    }

    /// The qubit channel of this family at strength `p`.
    pub fn channel(self, p: f64) -> Result<KrausChannel> {
        match self {
            Family::Depolarizing => depolarizing(p, 2),
            Family::AmplitudeDamping => amplitude_damping(p),
            Family::BitFlip => bit_flip(p),
            Family::PhaseFlip => phase_flip(p),
            Family::BitPhaseFlip => bit_phase_flip(p),
        }
    }

    /// Stable small integer used to derive per-family random streams.
    pub fn index(self) -> u64 {
        match self {
            Family::Depolarizing => 0,
            Family::AmplitudeDamping => 1,
            Family::BitFlip => 2,
            Family::PhaseFlip => 3,
            Family::BitPhaseFlip => 4,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s.trim())
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    label: String,
    p: f64,
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Checks that every operator is `dim × dim` and that the set is complete.
    pub fn new(label: impl Into<String>, p: f64, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = kraus
            .first()
            .map(ComplexMatrix::dim)
            .ok_or_else(|| Error::Config("a channel needs at least one Kraus operator".into()))?;
        if let Some(k) = kraus.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k.dim(),
            });
        }
        let channel = Self {
            label: label.into(),
            p,
            dim,
            kraus,
        };
        let defect = channel.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::Config(format!(
                "Kraus operators are not complete (defect {defect:e})"
            )));
        }
        Ok(channel)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            label: "id".into(),
            p: 0.0,
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `max |Σ K†K − I|` elementwise.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim);
        for k in &self.kraus {
            sum = &sum + &(&k.dagger() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// `Σ K ρ K†` on a raw matrix; the caller guarantees matching dimensions.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for k in &self.kraus {
            out = &out + &rho.conjugate_by(k);
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        Ok(DensityMatrix::trusted(self.apply_matrix(rho.matrix())))
    }

    /// The product channel `Λ ⊗ Λ` with Kraus set `{K_i ⊗ K_j}`.
    pub fn local(&self) -> KrausChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * self.kraus.len());
        for a in &self.kraus {
            for b in &self.kraus {
                kraus.push(a.kron(b));
            }
        }
        KrausChannel {
            label: format!("{0}⊗{0}", self.label),
            p: self.p,
            dim: self.dim * self.dim,
            kraus,
        }
    }

    /// `(Λ ⊗ Λ)(ρ)` for a two-qubit state.
    pub fn local_apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        self.local().apply(rho)
    }

    /// `(I ⊗ Λ)(|φ+⟩⟨φ+|)` with `|φ+⟩ = Σ|ii⟩/√d`.
    pub fn choi_state(&self) -> DensityMatrix {
        let d = self.dim;
        let mut choi = ComplexMatrix::zeros(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut unit = ComplexMatrix::zeros(d);
                unit[(i, j)] = re(1.0);
                let image = self.apply_matrix(&unit);
                for k in 0..d {
                    for l in 0..d {
                        choi[(i * d + k, j * d + l)] = image[(k, l)] / d as f64;
                    }
                }
            }
        }
        DensityMatrix::trusted(choi)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

fn check_strength(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::StrengthOutOfRange(p));
    }
    Ok(())
}

/// `ρ ↦ (1−p)ρ + (p/d) I`.
///
/// Realized with Pauli operators for qubits and with the `d²` Weyl
/// shift/clock operators otherwise.
pub fn depolarizing(p: f64, d: usize) -> Result<KrausChannel> {
    check_strength(p)?;
    if d < 2 {
        return Err(Error::Config(format!("depolarizing dimension {d} < 2")));
    }
    let dd = (d * d) as f64;
    let id_weight = (1.0 - p * (dd - 1.0) / dd).max(0.0).sqrt();
    let weight = (p / dd).sqrt();
    let kraus = if d == 2 {
        vec![
            ComplexMatrix::identity(2).scale_real(id_weight),
            pauli_x().scale_real(weight),
            pauli_y().scale_real(weight),
            pauli_z().scale_real(weight),
        ]
    } else {
        let omega = |k: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64);
        let mut ops = Vec::with_capacity(d * d);
        for a in 0..d {
            for b in 0..d {
                // X^a Z^b |j⟩ = ω^{bj} |j + a⟩
                let mut w = ComplexMatrix::zeros(d);
                for j in 0..d {
                    w[((j + a) % d, j)] = omega((b * j) % d);
                }
                let s = if a == 0 && b == 0 { id_weight } else { weight };
                ops.push(w.scale_real(s));
            }
        }
        ops
    };
    KrausChannel::new(Family::Depolarizing.name(), p, kraus)
}

/// `K0 = diag(1, √(1−p))`, `K1 = √p |0⟩⟨1|`.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_strength(p)?;
    let k0 = ComplexMatrix::diag_real(&[1.0, (1.0 - p).sqrt()]);
    let k1 = ComplexMatrix::from_real_rows([[0.0, p.sqrt()], [0.0, 0.0]]);
    KrausChannel::new(Family::AmplitudeDamping.name(), p, vec![k0, k1])
}

fn pauli_mixture(family: Family, p: f64, sigma: ComplexMatrix) -> Result<KrausChannel> {
    check_strength(p)?;
    let k0 = ComplexMatrix::identity(2).scale_real((1.0 - p / 2.0).sqrt());
    let k1 = sigma.scale_real((p / 2.0).sqrt());
    KrausChannel::new(family.name(), p, vec![k0, k1])
}

/// `ρ ↦ (1 − p/2) ρ + (p/2) σx ρ σx`.
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    pauli_mixture(Family::BitFlip, p, pauli_x())
}

/// `ρ ↦ (1 − p/2) ρ + (p/2) σz ρ σz`.
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    pauli_mixture(Family::PhaseFlip, p, pauli_z())
}

/// `ρ ↦ (1 − p/2) ρ + (p/2) σy ρ σy`.
pub fn bit_phase_flip(p: f64) -> Result<KrausChannel> {
    pauli_mixture(Family::BitPhaseFlip, p, pauli_y())
}

/// l1 distance between the Choi states of two channels.
pub fn channel_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    a.check_dim(b.dim)?;
    Ok((a.choi_state().matrix() - b.choi_state().matrix()).l1_norm())
}

/// `‖Λ(UρU†) − UΛ(ρ)U†‖₁`.
pub fn covariance_defect(
    channel: &KrausChannel,
    u: &ComplexMatrix,
    rho: &DensityMatrix,
) -> Result<f64> {
    channel.check_dim(rho.dim())?;
    channel.check_dim(u.dim())?;
    let rotated_then_noisy = channel.apply_matrix(&rho.matrix().conjugate_by(u));
    let noisy_then_rotated = channel.apply_matrix(rho.matrix()).conjugate_by(u);
    Ok((&rotated_then_noisy - &noisy_then_rotated).l1_norm())
}

/// Channel action recovered from a Choi state: `d · Tr₁[(ρᵀ ⊗ I) ρ_Λ]`.
pub fn choi_action(choi: &DensityMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = rho.dim();
    if choi.dim() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: choi.dim(),
        });
    }
    let lifted = &rho.transpose().kron(&ComplexMatrix::identity(d)) * choi.matrix();
    Ok(lifted.partial_trace((d, d), Keep::Second)?.scale_real(d as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_mixed, random_pure, random_unitary, stream, BlochVector, PureState};
    use crate::states::{bloch_to_density, density_to_bloch, unitary_from_angles, UnitaryAngles};
    use std::f64::consts::PI;

    fn zero() -> DensityMatrix {
        PureState::basis(2, 0).unwrap().to_density()
    }

    fn one() -> DensityMatrix {
        PureState::basis(2, 1).unwrap().to_density()
    }

    #[test]
    fn family_names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert!(matches!("xx".parse::<Family>(), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn strength_out_of_range_is_rejected() {
        for fam in Family::ALL {
            assert!(matches!(fam.channel(-0.1), Err(Error::StrengthOutOfRange(_))));
            assert!(matches!(fam.channel(1.5), Err(Error::StrengthOutOfRange(_))));
        }
        assert!(depolarizing(f64::NAN, 2).is_err());
    }

    #[test]
    fn completeness_on_grid() {
        for fam in Family::ALL {
            for i in 0..=20 {
                let ch = fam.channel(i as f64 / 20.0).unwrap();
                assert!(ch.completeness_defect() <= 1e-10);
                assert!(ch.kraus().iter().all(|k| k.dim() == 2));
            }
        }
        for d in [3, 4] {
            assert!(depolarizing(0.3, d).unwrap().completeness_defect() <= 1e-10);
        }
    }

    #[test]
    fn incomplete_kraus_set_is_rejected() {
        let k = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(KrausChannel::new("bad", 0.0, vec![k]).is_err());
    }

    #[test]
    fn depolarizing_examples() {
        let mut rng = stream(21, 0);
        let rho = random_mixed(2, &mut rng);
        let id = depolarizing(0.0, 2).unwrap().apply(&rho).unwrap();
        assert!(id.matrix().approx_eq(rho.matrix(), 1e-15));

        let full = depolarizing(1.0, 2).unwrap().apply(&rho).unwrap();
        assert!(full.matrix().approx_eq(DensityMatrix::maximally_mixed(2).matrix(), 1e-15));

        let half = depolarizing(0.5, 2).unwrap().apply(&zero()).unwrap();
        assert!(half.matrix().approx_eq(&ComplexMatrix::diag_real(&[0.75, 0.25]), 1e-15));
    }

    #[test]
    fn depolarizing_matches_closed_form_in_all_dimensions() {
        let mut rng = stream(22, 0);
        for d in [2, 3, 4] {
            for &p in &[0.0, 0.2, 0.7, 1.0] {
                let ch = depolarizing(p, d).unwrap();
                for _ in 0..20 {
                    let rho = random_mixed(d, &mut rng);
                    let expected = &rho.matrix().scale_real(1.0 - p)
                        + &ComplexMatrix::identity(d).scale_real(p / d as f64);
                    assert!(ch.apply(&rho).unwrap().matrix().approx_eq(&expected, 1e-12));
                }
            }
        }
    }

    #[test]
    fn amplitude_damping_examples() {
        let mut rng = stream(23, 0);
        let rho = random_mixed(2, &mut rng);
        let out = amplitude_damping(1.0).unwrap().apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(zero().matrix(), 1e-15));
        let out = amplitude_damping(0.0).unwrap().apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));
        let out = amplitude_damping(0.36).unwrap().apply(&one()).unwrap();
        assert!(out.matrix().approx_eq(&ComplexMatrix::diag_real(&[0.36, 0.64]), 1e-15));
    }

    #[test]
    fn amplitude_damping_bloch_contraction() {
        let mut rng = stream(24, 0);
        for &p in &[0.1, 0.5, 0.9] {
            let ch = amplitude_damping(p).unwrap();
            for _ in 0..100 {
                let rho = random_pure(2, &mut rng).to_density();
                let v = density_to_bloch(&rho).unwrap();
                let w = density_to_bloch(&ch.apply(&rho).unwrap()).unwrap();
                let s = (1.0 - p).sqrt();
                assert!((w.x - s * v.x).abs() < 1e-12);
                assert!((w.y - s * v.y).abs() < 1e-12);
                assert!((w.z - ((1.0 - p) * v.z + p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_channel_examples() {
        let out = bit_flip(1.0).unwrap().apply(&zero()).unwrap();
        assert!(out.matrix().approx_eq(DensityMatrix::maximally_mixed(2).matrix(), 1e-15));

        for &p in &[0.0, 0.3, 0.8, 1.0] {
            let plus = bloch_to_density(BlochVector::new(1.0, 0.0, 0.0).unwrap());
            let out = phase_flip(p).unwrap().apply(&plus).unwrap();
            // Off-diagonal coherence 1/2 scales by (1 - p).
            let expected = ComplexMatrix::from_real_rows([
                [0.5, 0.5 * (1.0 - p)],
                [0.5 * (1.0 - p), 0.5],
            ]);
            assert!(out.matrix().approx_eq(&expected, 1e-15));
        }

        let mut rng = stream(25, 0);
        let rho = random_mixed(2, &mut rng);
        let out = bit_phase_flip(0.0).unwrap().apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));
    }

    #[test]
    fn apply_preserves_trace_and_positivity() {
        let mut rng = stream(26, 0);
        for fam in Family::ALL {
            for &p in &[0.0, 0.35, 0.8, 1.0] {
                let ch = fam.channel(p).unwrap();
                for _ in 0..250 {
                    let rho = random_mixed(2, &mut rng);
                    let out = ch.apply(&rho).unwrap();
                    assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
                    assert!(out.matrix().min_eigenvalue().unwrap() >= -1e-10);
                }
            }
        }
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let ch = bit_flip(0.1).unwrap();
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(ch.apply(&rho), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            ch.local_apply(&DensityMatrix::maximally_mixed(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn local_apply_examples() {
        let bell = PureState::bell_phi_plus().to_density();
        let out = KrausChannel::identity(2).local_apply(&bell).unwrap();
        assert!(out.matrix().approx_eq(bell.matrix(), 1e-15));

        for &p in &[0.0, 0.25, 0.6, 1.0] {
            let out = phase_flip(p).unwrap().local_apply(&bell).unwrap();
            let q = (1.0 - p) * (1.0 - p) / 2.0;
            let mut expected = ComplexMatrix::diag_real(&[0.5, 0.0, 0.0, 0.5]);
            expected[(0, 3)] = re(q);
            expected[(3, 0)] = re(q);
            assert!(out.matrix().approx_eq(&expected, 1e-15));
        }

        let mut rng = stream(27, 0);
        let rho = random_mixed(4, &mut rng);
        let out = amplitude_damping(1.0).unwrap().local_apply(&rho).unwrap();
        let expected = PureState::basis(4, 0).unwrap().to_density();
        assert!(out.matrix().approx_eq(expected.matrix(), 1e-15));
    }

    #[test]
    fn local_apply_factorizes_on_products() {
        let mut rng = stream(28, 0);
        for fam in Family::ALL {
            let ch = fam.channel(0.37).unwrap();
            for _ in 0..50 {
                let a = random_mixed(2, &mut rng);
                let b = random_mixed(2, &mut rng);
                let joint = ch.local_apply(&a.kron(&b)).unwrap();
                let split = ch.apply(&a).unwrap().kron(&ch.apply(&b).unwrap());
                assert!(joint.matrix().approx_eq(split.matrix(), 1e-12));
            }
        }
    }

    #[test]
    fn choi_state_examples() {
        let bell = PureState::bell_phi_plus().to_density();
        let choi = KrausChannel::identity(2).choi_state();
        assert!(choi.matrix().approx_eq(bell.matrix(), 1e-15));

        let choi = depolarizing(1.0, 2).unwrap().choi_state();
        assert!(choi.matrix().approx_eq(DensityMatrix::maximally_mixed(4).matrix(), 1e-15));

        for fam in Family::ALL {
            let choi = fam.channel(0.4).unwrap().choi_state();
            choi.validate().unwrap();
            let marginal = choi.matrix().partial_trace((2, 2), Keep::First).unwrap();
            assert!(marginal.approx_eq(DensityMatrix::maximally_mixed(2).matrix(), 1e-12));
        }
    }

    #[test]
    fn choi_inversion_matches_kraus_action() {
        let mut rng = stream(29, 0);
        for fam in Family::ALL {
            let ch = fam.channel(0.63).unwrap();
            let choi = ch.choi_state();
            for _ in 0..100 {
                let rho = random_mixed(2, &mut rng);
                let via_choi = choi_action(&choi, rho.matrix()).unwrap();
                assert!(via_choi.approx_eq(ch.apply(&rho).unwrap().matrix(), 1e-10));
            }
        }
        let ch = depolarizing(0.45, 3).unwrap();
        let rho = random_mixed(3, &mut rng);
        let via_choi = choi_action(&ch.choi_state(), rho.matrix()).unwrap();
        assert!(via_choi.approx_eq(ch.apply(&rho).unwrap().matrix(), 1e-10));
    }

    #[test]
    fn channel_distance_examples() {
        let ad = amplitude_damping(0.3).unwrap();
        assert_eq!(channel_distance(&ad, &ad).unwrap(), 0.0);

        // Hand expansion: p·(|φ+⟩⟨φ+| − I/4) has column 00 entries
        // (1/4, 0, 0, 1/2)·p, so the maximal absolute column sum is 0.75p.
        let id = KrausChannel::identity(2);
        for &p in &[0.0, 0.2, 0.5, 1.0] {
            let d = channel_distance(&id, &depolarizing(p, 2).unwrap()).unwrap();
            assert!((d - 0.75 * p).abs() < 1e-12, "p={p} d={d}");
        }

        let bf = bit_flip(0.7).unwrap();
        assert_eq!(
            channel_distance(&ad, &bf).unwrap(),
            channel_distance(&bf, &ad).unwrap()
        );
        assert!(channel_distance(&ad, &depolarizing(0.2, 3).unwrap()).is_err());
    }

    #[test]
    fn covariance_defect_examples() {
        let mut rng = stream(30, 0);
        let u = random_unitary(&mut rng);
        let rho = random_mixed(2, &mut rng);
        assert!(covariance_defect(&KrausChannel::identity(2), &u, &rho).unwrap() < 1e-15);
        assert!(covariance_defect(&depolarizing(0.4, 2).unwrap(), &u, &rho).unwrap() < 1e-12);

        let h = unitary_from_angles(UnitaryAngles::new(PI / 2.0, 0.0, PI));
        let d = covariance_defect(&amplitude_damping(0.5).unwrap(), &h, &zero()).unwrap();
        assert!(d > 0.1, "defect {d}");
    }

    #[test]
    fn depolarizing_is_covariant() {
        let mut rng = stream(31, 0);
        for &p in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let ch = depolarizing(p, 2).unwrap();
            for _ in 0..1000 {
                let u = random_unitary(&mut rng);
                let rho = random_mixed(2, &mut rng);
                assert!(covariance_defect(&ch, &u, &rho).unwrap() <= 1e-10);
            }
        }
    }
}
