//! Derivative-free multi-start maximization and a brute-force grid oracle.
//!
//! Each restart draws its start point from its own random sub-stream of the
//! configured seed, so results do not depend on evaluation order.

use rand::Rng;

use crate::error::{Error, Result};
use crate::states::stream;

/// Largest grid the oracle will evaluate.
pub const GRID_GUARD: f64 = 1e8;
/// Local optima closer than this (after angle wrapping) are the same optimum.
pub const DISTINCT_DISTANCE: f64 = 1e-3;

/// A search interval; periodic intervals wrap instead of clamping. The
/// objective must then be periodic in that coordinate with the interval's
/// width as period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: false,
        }
    }

    pub const fn periodic(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            periodic: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn project(&self, x: f64) -> f64 {
        if self.periodic {
            let w = self.width();
            let y = (x - self.lo).rem_euclid(w) + self.lo;
            if y >= self.hi {
                self.lo
            } else {
                y
            }
        } else {
            x.clamp(self.lo, self.hi)
        }
    }

    fn separation(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        if self.periodic {
            let w = self.width();
            let d = d.rem_euclid(w);
            d.min(w - d)
        } else {
            d
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub f_tolerance: f64,
    pub x_tolerance: f64,
    pub top_k: usize,
    pub seed: u64,
    pub grid_resolution: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iterations: 2000,
            f_tolerance: 1e-9,
            x_tolerance: 1e-8,
            top_k: 3,
            seed: 42,
            grid_resolution: 9,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 || self.top_k == 0 {
            return Err(Error::Config("optimizer counts must be at least 1".into()));
        }
        if self.grid_resolution == 0 {
            return Err(Error::Config("grid resolution must be at least 1".into()));
        }
        if !(self.f_tolerance > 0.0 && self.x_tolerance > 0.0) {
            return Err(Error::Config("optimizer tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// One converged (or budget-exhausted) local search.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOptimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub restart: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct MultiStartResult {
    pub best_value: f64,
    pub best_params: Vec<f64>,
    /// Up to `top_k` distinct optima, best first.
    pub optima: Vec<LocalOptimum>,
    pub restarts_run: usize,
    pub non_converged: usize,
    pub evaluations: usize,
}

/// Maximizes `objective` over the box `bounds` with `cfg.restarts`
/// Nelder–Mead searches from uniform random starts.
///
/// Ties between restarts go to the lowest restart index.
pub fn multi_start_maximize<F>(objective: F, bounds: &[Interval], cfg: &OptimizerConfig) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64,
{
    multi_start_maximize_from(objective, bounds, cfg, &[])
}

/// Like [`multi_start_maximize`], with extra deterministic start points run
/// before the random restarts.
pub fn multi_start_maximize_from<F>(
    objective: F,
    bounds: &[Interval],
    cfg: &OptimizerConfig,
    seeds: &[Vec<f64>],
) -> MultiStartResult
where
    F: Fn(&[f64]) -> f64,
{
    let mut runs = Vec::with_capacity(cfg.restarts + seeds.len());
    let mut evaluations = 0usize;
    let starts = seeds.iter().cloned().chain((0..cfg.restarts).map(|r| {
        let mut rng = stream(cfg.seed, r as u64);
        bounds
            .iter()
            .map(|b| if b.width() > 0.0 { rng.random_range(b.lo..b.hi) } else { b.lo })
            .collect::<Vec<f64>>()
    }));
    for (index, start) in starts.enumerate() {
        let run = nelder_mead_max(&objective, bounds, start, cfg);
        evaluations += run.evaluations;
        runs.push(LocalOptimum {
            params: run.params,
            value: run.value,
            restart: index,
            converged: run.converged,
        });
    }

    let non_converged = runs.iter().filter(|r| !r.converged).count();
    let mut ranked = runs.clone();
    // Stable sort keeps the lowest restart first among equal values.
    ranked.sort_by(|a, b| b.value.total_cmp(&a.value));

    let mut optima: Vec<LocalOptimum> = Vec::with_capacity(cfg.top_k);
    for cand in ranked {
        if optima.len() == cfg.top_k {
            break;
        }
        if optima
            .iter()
            .all(|o| param_distance(bounds, &o.params, &cand.params) > DISTINCT_DISTANCE)
        {
            optima.push(cand);
        }
    }
    let best = optima[0].clone();
    MultiStartResult {
        best_value: best.value,
        best_params: best.params,
        optima,
        restarts_run: runs.len(),
        non_converged,
        evaluations,
    }
}

/// Euclidean distance with periodic coordinates wrapped.
pub fn param_distance(bounds: &[Interval], a: &[f64], b: &[f64]) -> f64 {
    bounds
        .iter()
        .zip(a.iter().zip(b))
        .map(|(iv, (x, y))| iv.separation(*x, *y).powi(2))
        .sum::<f64>()
        .sqrt()
}

struct LocalRun {
    params: Vec<f64>,
    value: f64,
    converged: bool,
    evaluations: usize,
}

/// Bounded Nelder–Mead (adaptive coefficients), maximizing. Trial points are
/// projected into the box. After convergence the simplex is rebuilt around
/// the best vertex and the search resumed while that still improves.
fn nelder_mead_max<F>(objective: &F, bounds: &[Interval], start: Vec<f64>, cfg: &OptimizerConfig) -> LocalRun
where
    F: Fn(&[f64]) -> f64,
{
    let n = bounds.len();
    // Periodic coordinates move freely during the search and are wrapped
    // only on output, so shrink and reflection steps never jump the seam.
    let project = |x: &mut Vec<f64>| {
        for (xi, b) in x.iter_mut().zip(bounds) {
            if !b.periodic {
                *xi = b.project(*xi);
            }
        }
    };
    let mut evals = 0usize;
    let mut f = |x: &[f64]| {
        evals += 1;
        let v = objective(x);
        // Non-finite values rank below every finite one.
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };

    let nf = n.max(1) as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut best_x = start;
    for (xi, b) in best_x.iter_mut().zip(bounds) {
        *xi = b.project(*xi);
    }
    let mut best_f = f(&best_x);
    if n == 0 {
        return LocalRun {
            params: best_x,
            value: -best_f,
            converged: true,
            evaluations: evals,
        };
    }

    let mut iterations = 0usize;
    let mut converged = false;
    let mut rebuilds = 0usize;
    let mut step_scale = 0.1;
    while iterations < cfg.max_iterations {
        // Build a simplex around the incumbent.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let mut x = best_x.clone();
            let step = step_scale * bounds[i].width().max(1e-3);
            x[i] = if bounds[i].periodic || x[i] + step <= bounds[i].hi {
                x[i] + step
            } else {
                x[i] - step
            };
            project(&mut x);
            let fx = f(&x);
            simplex.push((x, fx));
        }

        let mut local_converged = false;
        while iterations < cfg.max_iterations {
            iterations += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_spread = simplex[n].1 - simplex[0].1;
            let x_spread = simplex[1..]
                .iter()
                .map(|(x, _)| param_distance_inf(bounds, x, &simplex[0].0))
                .fold(0.0, f64::max);
            if f_spread <= cfg.f_tolerance && x_spread <= cfg.x_tolerance {
                local_converged = true;
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let along = |t: f64, worst: &[f64]| -> Vec<f64> {
                let mut v: Vec<f64> = centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect();
                project(&mut v);
                v
            };
            let worst = simplex[n].0.clone();
            let xr = along(alpha, &worst);
            let fr = f(&xr);
            if fr < simplex[0].1 {
                let xe = along(gamma, &worst);
                let fe = f(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[n].1 {
                    let xc = along(rho, &worst);
                    let fc = f(&xc);
                    (xc, fc)
                } else {
                    let xc = along(-rho, &worst);
                    let fc = f(&xc);
                    (xc, fc)
                };
                if fc < simplex[n].1.min(fr) {
                    simplex[n] = (xc, fc);
                } else {
                    let x0 = simplex[0].0.clone();
                    for (x, fx) in simplex[1..].iter_mut() {
                        for (xi, bi) in x.iter_mut().zip(&x0) {
                            *xi = bi + sigma * (*xi - bi);
                        }
                        project(x);
                        *fx = f(x);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let improved = simplex[0].1 < best_f - cfg.f_tolerance;
        if simplex[0].1 <= best_f {
            best_x = simplex[0].0.clone();
            best_f = simplex[0].1;
        }
        if !local_converged {
            break;
        }
        if rebuilds > 0 && !improved {
            converged = true;
            break;
        }
        rebuilds += 1;
        step_scale = 0.02;
        if rebuilds > 4 {
            converged = true;
            break;
        }
    }

    for (xi, b) in best_x.iter_mut().zip(bounds) {
        *xi = b.project(*xi);
    }
    LocalRun {
        params: best_x,
        value: -best_f,
        converged,
        evaluations: evals,
    }
}

fn param_distance_inf(bounds: &[Interval], a: &[f64], b: &[f64]) -> f64 {
    bounds
        .iter()
        .zip(a.iter().zip(b))
        .map(|(iv, (x, y))| iv.separation(*x, *y))
        .fold(0.0, f64::max)
}

/// Maximum of `objective` over the uniform grid with `resolution` points per
/// dimension, endpoints included. Returns the value and its grid point.
pub fn grid_oracle<F>(objective: F, bounds: &[Interval], resolution: usize) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    grid_oracle_axes(objective, bounds, &vec![resolution; bounds.len()])
}

/// [`grid_oracle`] with a separate resolution for each axis.
pub fn grid_oracle_axes<F>(objective: F, bounds: &[Interval], resolutions: &[usize]) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    assert_eq!(bounds.len(), resolutions.len());
    let total: f64 = resolutions.iter().map(|&r| r as f64).product();
    if total > GRID_GUARD || resolutions.contains(&0) {
        return Err(Error::GridTooLarge { evaluations: total });
    }
    let coord = |d: usize, k: usize| {
        let (b, res) = (&bounds[d], resolutions[d]);
        if res == 1 {
            b.lo
        } else {
            b.lo + b.width() * k as f64 / (res - 1) as f64
        }
    };
    let n = bounds.len();
    let mut idx = vec![0usize; n];
    let mut x: Vec<f64> = (0..n).map(|d| coord(d, 0)).collect();
    let mut best = (f64::NEG_INFINITY, x.clone());
    loop {
        let v = objective(&x);
        if v > best.0 {
            best = (v, x.clone());
        }
        // Odometer increment.
        let mut d = 0;
        loop {
            if d == n {
                return Ok(best);
            }
            idx[d] += 1;
            if idx[d] < resolutions[d] {
                x[d] = coord(d, idx[d]);
                break;
            }
            idx[d] = 0;
            x[d] = coord(d, 0);
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::default()
        }
    }

    #[test]
    fn maximizes_concave_quadratic() {
        let r = multi_start_maximize(|x| -(x[0] - 0.3).powi(2), &[Interval::new(0.0, 1.0)], &quick());
        assert!(r.best_value.abs() < 1e-9);
        assert!((r.best_params[0] - 0.3).abs() < 1e-6);
        assert_eq!(r.restarts_run, 8);
    }

    #[test]
    fn constant_objective_returns_constant() {
        let b = [Interval::new(-1.0, 1.0), Interval::periodic(0.0, 6.0)];
        let r = multi_start_maximize(|_| 2.5, &b, &quick());
        assert_eq!(r.best_value, 2.5);
        assert_eq!(grid_oracle(|_| 2.5, &b, 4).unwrap().0, 2.5);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let b = [Interval::new(-2.0, 2.0), Interval::new(-2.0, 2.0)];
        let rosen = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let a = multi_start_maximize(rosen, &b, &quick());
        let c = multi_start_maximize(rosen, &b, &quick());
        assert_eq!(a.best_params, c.best_params);
        assert_eq!(a.best_value.to_bits(), c.best_value.to_bits());
        assert!(a.best_value > -1e-8);
        let d = multi_start_maximize(rosen, &b, &quick().with_seed(7));
        assert_ne!(a.best_params, d.best_params);
    }

    #[test]
    fn top_k_optima_are_distinct() {
        // Four equal peaks at (±1, ±1).
        let f = |x: &[f64]| -((x[0] * x[0] - 1.0).powi(2) + (x[1] * x[1] - 1.0).powi(2));
        let b = [Interval::new(-2.0, 2.0), Interval::new(-2.0, 2.0)];
        let cfg = OptimizerConfig {
            restarts: 30,
            top_k: 4,
            ..OptimizerConfig::default()
        };
        let r = multi_start_maximize(f, &b, &cfg);
        assert_eq!(r.optima.len(), 4);
        for (i, a) in r.optima.iter().enumerate() {
            assert!(a.value > -1e-8);
            for o in &r.optima[i + 1..] {
                assert!(param_distance(&b, &a.params, &o.params) > DISTINCT_DISTANCE);
            }
        }
        assert!(r.optima.windows(2).all(|w| w[0].value >= w[1].value));
    }

    #[test]
    fn periodic_coordinates_wrap() {
        let iv = Interval::periodic(0.0, 1.0);
        assert!((iv.project(1.25) - 0.25).abs() < 1e-15);
        assert!((iv.project(-0.25) - 0.75).abs() < 1e-15);
        assert!((iv.separation(0.05, 0.95) - 0.1).abs() < 1e-15);
        // A peak straddling the wrap point is still found.
        let f = |x: &[f64]| (2.0 * std::f64::consts::PI * x[0]).cos();
        let r = multi_start_maximize(f, &[iv], &quick());
        assert!((r.best_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beats_grid_oracle() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() - 0.1 * x[0] * x[1];
        let b = [Interval::new(-2.0, 2.0), Interval::new(-2.0, 2.0)];
        let cfg = quick();
        let grid = grid_oracle(f, &b, cfg.grid_resolution).unwrap().0;
        let r = multi_start_maximize(f, &b, &cfg);
        assert!(r.best_value >= grid - 1e-6);
    }

    #[test]
    fn grid_oracle_examples() {
        let (v, x) = grid_oracle(|x| -(x[0] - 0.3).powi(2), &[Interval::new(0.0, 1.0)], 11).unwrap();
        assert!(v.abs() < 1e-15 && (x[0] - 0.3).abs() < 1e-15);
        let (v, _) = grid_oracle(|x| x[0].exp(), &[Interval::new(0.0, 1.0)], 7).unwrap();
        assert_eq!(v, 1f64.exp());
        let big = vec![Interval::new(0.0, 1.0); 9];
        assert!(matches!(grid_oracle(|_| 0.0, &big, 10), Err(Error::GridTooLarge { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        assert!(OptimizerConfig { restarts: 0, ..Default::default() }.validate().is_err());
        assert!(OptimizerConfig { f_tolerance: 0.0, ..Default::default() }.validate().is_err());
    }
}
