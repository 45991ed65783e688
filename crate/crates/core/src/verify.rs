//! Self-check suites behind `entsave verify`.
//!
//! Each check reduces to a measured deviation compared against a tolerance;
//! the report prints both together with the slack between them.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::channels::{choi_action, covariance_defect, depolarizing, phase_flip, Family, KrausChannel};
use crate::entanglement::{concurrence_matrix, concurrence_via_omega};
use crate::error::{Error, Result};
use crate::measures::{
    cds, ddc, eb_bounds, entanglement_capacity, saved_entanglement, saved_entanglement_of, se_objective_at,
};
use crate::optimize::OptimizerConfig;
use crate::states::{density_to_bloch, random_mixed, random_pure, random_unitary, stream, DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(Error::Config(format!("unknown verify level `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }

    pub fn slack(&self) -> f64 {
        self.tolerance - self.measured
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<44} measured {:>11.3e}  tol {:>9.1e}  slack {:>10.3e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.slack()
            )?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, name: &str, measured: f64, tolerance: f64) {
        // NaN deviations must fail.
        let measured = if measured.is_nan() { f64::INFINITY } else { measured };
        self.checks.push(Check {
            name: name.to_string(),
            measured,
            tolerance,
        });
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(x) })
}

fn p_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

pub fn verify(level: Level) -> Result<Report> {
    let full = level == Level::Full;
    let scale = |quick: usize, full_n: usize| if full { full_n } else { quick };
    let mut s = Suite { checks: Vec::new() };
    let mut rng = stream(20_240_501, 0);

    // matkernel
    let mut herm_residual = 0.0f64;
    let mut l1_violation = 0.0f64;
    for _ in 0..scale(50, 200) {
        let a = random_mixed(4, &mut rng).into_matrix();
        let b = random_mixed(4, &mut rng).into_matrix();
        let eig = a.eig_hermitian()?;
        herm_residual = herm_residual.max(a.max_abs_diff(&eig.reconstruct_with(&eig.values)));
        let tri = (&a + &b).l1_norm() - a.l1_norm() - b.l1_norm();
        let hom = ((a.scale_real(-2.5)).l1_norm() - 2.5 * a.l1_norm()).abs();
        l1_violation = l1_violation.max(tri).max(hom);
    }
    s.push("hermitian eigendecomposition residual", herm_residual, 1e-9);
    s.push("l1 norm triangle / homogeneity", l1_violation, 1e-12);

    // channels
    let grid = p_grid(11);
    let completeness = max_of(
        Family::ALL
            .iter()
            .flat_map(|f| grid.iter().map(move |&p| f.channel(p).map(|c| c.completeness_defect())))
            .collect::<Result<Vec<_>>>()?,
    );
    s.push("kraus completeness, all families", completeness, 1e-10);

    let mut choi_gap = 0.0f64;
    for fam in Family::ALL {
        let ch = fam.channel(0.37)?;
        let choi = ch.choi_state();
        for _ in 0..scale(20, 100) {
            let rho = random_mixed(2, &mut rng);
            let via_choi = choi_action(&choi, rho.matrix())?;
            choi_gap = choi_gap.max(via_choi.max_abs_diff(&ch.apply_matrix(rho.matrix())));
        }
    }
    s.push("choi action matches kraus action", choi_gap, 1e-10);

    let mut cov = 0.0f64;
    for _ in 0..scale(200, 1000) {
        let p: f64 = rng.random();
        let ch = depolarizing(p, 2)?;
        let u = random_unitary(&mut rng);
        let rho = random_mixed(2, &mut rng);
        cov = cov.max(covariance_defect(&ch, &u, &rho)?);
    }
    s.push("depolarizing covariance defect", cov, 1e-10);

    // quantum states
    let samples = scale(2000, 10_000);
    let mut mean = [0.0; 3];
    for _ in 0..samples {
        let v = density_to_bloch(&random_pure(2, &mut rng).to_density())?;
        mean[0] += v.x / samples as f64;
        mean[1] += v.y / samples as f64;
        mean[2] += v.z / samples as f64;
    }
    s.push("haar qubit mean bloch vector", max_of(mean.map(f64::abs)), 0.05);

    // entanglement
    let mut lu = 0.0f64;
    let mut routes = 0.0f64;
    for _ in 0..scale(100, 400) {
        let rho = random_mixed(4, &mut rng);
        let uv = random_unitary(&mut rng).kron(&random_unitary(&mut rng));
        let a = concurrence_matrix(rho.matrix())?;
        lu = lu.max((a - concurrence_matrix(rho.conjugate_by(&uv).matrix())?).abs());
        routes = routes.max((a - concurrence_via_omega(rho.matrix())?).abs());
    }
    s.push("concurrence local-unitary invariance", lu, 1e-9);
    s.push("concurrence eigenvalue routes agree", routes, 1e-8);

    let bell = PureState::bell_phi_plus().to_density();
    let pf_gap = max_of(
        p_grid(21)
            .into_iter()
            .map(|p| {
                let out = phase_flip(p)?.local_apply(&bell)?;
                Ok((concurrence_matrix(out.matrix())? - (1.0 - p).powi(2)).abs())
            })
            .collect::<Result<Vec<_>>>()?,
    );
    s.push("dephased bell concurrence (1-p)^2", pf_gap, 1e-10);

    let werner = max_of(
        p_grid(21)
            .into_iter()
            .map(|w| {
                let rho = bell.mix(&DensityMatrix::maximally_mixed(4), w);
                Ok((concurrence_matrix(rho.matrix())? - ((3.0 * w - 1.0) / 2.0).max(0.0)).abs())
            })
            .collect::<Result<Vec<_>>>()?,
    );
    s.push("werner concurrence closed form", werner, 1e-8);

    // measures
    let mut thm1 = 0.0f64;
    for _ in 0..scale(100, 500) {
        let p: f64 = rng.random();
        let ch = depolarizing(p, 2)?;
        let rho = random_pure(4, &mut rng).to_density();
        thm1 = thm1.max(se_objective_at(&ch, &random_unitary(&mut rng), &rho)?.abs());
    }
    s.push("SE objective vanishes for depolarizing", thm1, 1e-10);

    let ddc_dc = max_of(
        grid.iter()
            .map(|&q| ddc(&depolarizing(q, 2)?).map(|d| d.value))
            .collect::<Result<Vec<_>>>()?,
    );
    s.push("DDC of depolarizing channels", ddc_dc, 1e-8);
    s.push("DDC of identity", ddc(&KrausChannel::identity(2))?.value, 1e-12);

    let cds_cfg = OptimizerConfig::default().with_restarts(scale(6, 20));
    let cds_points = if full { p_grid(21) } else { p_grid(5) };
    let mut cds_ad = 0.0f64;
    let mut cds_bf = 0.0f64;
    let mut cds_dc = 0.0f64;
    for &p in &cds_points {
        let ad = cds(&Family::AmplitudeDamping.channel(p)?, &cds_cfg)?.value;
        cds_ad = cds_ad.max((ad - ((1.0 - p).sqrt() - (1.0 - p))).abs());
        cds_bf = cds_bf.max((cds(&Family::BitFlip.channel(p)?, &cds_cfg)?.value - p).abs());
        cds_dc = cds_dc.max(cds(&Family::Depolarizing.channel(p)?, &cds_cfg)?.value);
    }
    s.push("CDS(ad) = sqrt(1-p) - (1-p)", cds_ad, 1e-5);
    s.push("CDS(bf) = p", cds_bf, 1e-5);
    s.push("CDS(dc) = 0", cds_dc, 1e-8);

    if full {
        full_suite(&mut s)?;
    }
    Ok(Report {
        level,
        checks: s.checks,
    })
}

fn full_suite(s: &mut Suite) -> Result<()> {
    let cfg = OptimizerConfig::default().with_restarts(20);

    let se_dc = max_of(
        p_grid(11)
            .into_iter()
            .map(|p| saved_entanglement(Family::Depolarizing, p, &cfg).map(|r| r.value.abs()))
            .collect::<Result<Vec<_>>>()?,
    );
    s.push("SE(dc) vanishes", se_dc, 1e-4);

    let ad_ends = max_of([
        saved_entanglement(Family::AmplitudeDamping, 0.0, &cfg)?.value.abs(),
        saved_entanglement(Family::AmplitudeDamping, 1.0, &cfg)?.value.abs(),
    ]);
    s.push("SE(ad) at p = 0 and p = 1", ad_ends, 1e-6);

    let ch = Family::AmplitudeDamping.channel(0.5)?;
    let se = saved_entanglement_of(&ch, &cfg)?;
    // Lower bounds are recorded as negated deviations.
    s.push("SE(ad, 0.5) > 0.01 (negated)", -se.value, -0.01);
    let eb = eb_bounds(&ch, &se.pairs)?;
    s.push("SE <= EB1 at ad 0.5", se.value - eb.eb1, 1e-6);
    s.push("EB1 <= EB2 at ad 0.5", eb.eb1 - eb.eb2, 1e-6);
    s.push("|EB1 - EB2| at ad 0.5", (eb.eb1 - eb.eb2).abs(), 1e-4);

    let flips: Vec<f64> = [Family::BitFlip, Family::PhaseFlip, Family::BitPhaseFlip]
        .into_iter()
        .map(|f| saved_entanglement(f, 0.4, &cfg).map(|r| r.value))
        .collect::<Result<_>>()?;
    let spread = flips.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - flips.iter().cloned().fold(f64::INFINITY, f64::min);
    s.push("SE(bf) = SE(pf) = SE(bpf) at 0.4", spread, 1e-3);

    let mut ec_ends = 0.0f64;
    for fam in Family::ALL {
        ec_ends = ec_ends.max((entanglement_capacity(fam, 0.0, &cfg)?.value - 1.0).abs());
        if fam != Family::Depolarizing {
            ec_ends = ec_ends.max(entanglement_capacity(fam, 1.0, &cfg)?.value.abs());
        }
    }
    s.push("EC endpoints", ec_ends, 1e-6);
    Ok(())
}
