//! Functional-level checks that are too slow for unit tests: optimizer
//! soundness against brute-force grids, and the full verify level.

use entsave::channels::Family;
use entsave::measures::{
    cds, entanglement_capacity_of, fidelity_sum, ic, joint_bounds, saved_entanglement_of, state_bounds, LocalNoise,
};
use entsave::optimize::{grid_oracle, OptimizerConfig};
use entsave::verify::{verify, Level};

fn cfg() -> OptimizerConfig {
    OptimizerConfig::default().with_restarts(20)
}

#[test]
fn ec_and_cds_beat_their_grids() {
    for fam in Family::ALL {
        let ch = fam.channel(0.35).unwrap();
        let noise = LocalNoise::new(&ch).unwrap();
        let (grid_ec, _) = grid_oracle(|x| noise.ec_objective(x), &state_bounds(), 7).unwrap();
        let ec = entanglement_capacity_of(&ch, &cfg()).unwrap().value;
        assert!(ec >= grid_ec - 1e-6, "{fam}: EC {ec} < grid {grid_ec}");

        let bounds = entsave::measures::qubit_bounds();
        let (fmax, _) = grid_oracle(|x| fidelity_sum(&ch, x), &bounds, 41).unwrap();
        let (fmin_neg, _) = grid_oracle(|x| -fidelity_sum(&ch, x), &bounds, 41).unwrap();
        let got = cds(&ch, &cfg()).unwrap();
        assert!(got.max_fidelity_sum >= fmax - 1e-6);
        assert!(got.min_fidelity_sum <= -fmin_neg + 1e-6);
    }
}

#[test]
fn se_and_ic_beat_coarse_grids() {
    let ch = Family::AmplitudeDamping.channel(0.5).unwrap();
    let noise = LocalNoise::new(&ch).unwrap();
    let (grid_se, _) = grid_oracle(|x| noise.se_objective(x), &joint_bounds(), 5).unwrap();
    let se = saved_entanglement_of(&ch, &cfg()).unwrap().value;
    assert!(se >= grid_se - 1e-6, "SE {se} < grid {grid_se}");
    let (grid_ic, _) = grid_oracle(|x| noise.ic_objective(x), &joint_bounds(), 5).unwrap();
    let got = ic(&ch, &cfg()).unwrap().value;
    assert!(got >= grid_ic - 1e-6, "IC {got} < grid {grid_ic}");
}

#[test]
fn se_is_nonnegative_and_below_eb1() {
    for fam in Family::ALL {
        for p in [0.1, 0.45, 0.9] {
            let ch = fam.channel(p).unwrap();
            let se = saved_entanglement_of(&ch, &OptimizerConfig::default().with_restarts(8)).unwrap();
            assert!(se.value >= -1e-9);
            let eb = entsave::measures::eb_bounds(&ch, &se.pairs).unwrap();
            assert!(se.value <= eb.eb1 + 1e-6 && eb.eb1 <= eb.eb2 + 1e-6, "{fam} {p}");
            for b in &eb.per_pair {
                let d = &b.decomposition;
                let (sigma, tau) = noise_pair(&ch, &b.pair);
                let rebuilt = &tau.scale_real(d.p1) + &d.rho_prime.scale_real(d.p2);
                assert!(rebuilt.approx_eq(&sigma, 1e-9));
                assert!(d.rho_prime.min_eigenvalue().unwrap() >= -1e-8);
            }
        }
    }
}

fn noise_pair(
    ch: &entsave::channels::KrausChannel,
    pair: &entsave::measures::OptimizerPair,
) -> (entsave::matrix::ComplexMatrix, entsave::matrix::ComplexMatrix) {
    LocalNoise::new(ch)
        .unwrap()
        .post_states(&pair.state_params, &pair.unitary_angles.to_array())
}

#[test]
fn verify_full_passes() {
    let report = verify(Level::Full).unwrap();
    assert!(report.passed(), "{report}");
}
