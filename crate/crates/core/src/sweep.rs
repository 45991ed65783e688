//! Parameter sweeps over (family, p) and the CSV format they are stored in.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::channels::Family;
use crate::error::{Error, Result};
use crate::measures::{
    cds, ddc_with_mode, eb_bounds, entanglement_capacity_of, ic, saved_entanglement_of, DdcMode,
};
use crate::optimize::OptimizerConfig;
use crate::states::derive_seed;

/// Worker threads for [`run_sweep`]; unset means available parallelism.
pub const WORKERS_ENV: &str = "ENTSAVE_WORKERS";

pub const CSV_HEADER: [&str; 12] = [
    "family",
    "p",
    "se",
    "ec",
    "ddc",
    "cds",
    "ic",
    "eb1",
    "eb2",
    "restarts_used",
    "seed",
    "wall_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Se,
    Ec,
    Ddc,
    Cds,
    Ic,
    /// EB1 and EB2 together; needs the SE optimization even when `se` is not
    /// requested.
    Eb,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Se,
        Measure::Ec,
        Measure::Ddc,
        Measure::Cds,
        Measure::Ic,
        Measure::Eb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Se => "se",
            Measure::Ec => "ec",
            Measure::Ddc => "ddc",
            Measure::Cds => "cds",
            Measure::Ic => "ic",
            Measure::Eb => "eb",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::UnknownMeasure(s.to_string()))
    }
}

/// Parse a comma-separated list such as `dc,ad,bf`.
pub fn parse_list<T: FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub families: Vec<Family>,
    pub p_start: f64,
    pub p_end: f64,
    pub p_steps: usize,
    pub measures: BTreeSet<Measure>,
    pub optimizer: OptimizerConfig,
    pub ddc_mode: DdcMode,
    /// Record wall-clock time per point. Off by default so that equal seeds
    /// give byte-identical files.
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            families: Family::ALL.to_vec(),
            p_start: 0.0,
            p_end: 1.0,
            p_steps: 21,
            measures: Measure::ALL.into_iter().collect(),
            optimizer: OptimizerConfig::default(),
            ddc_mode: DdcMode::Nearest,
            timing: false,
            out: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.families.is_empty() {
            return Err(Error::Config("no families selected".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("no measures selected".into()));
        }
        if self.p_steps == 0 {
            return Err(Error::Config("p_steps must be at least 1".into()));
        }
        if !(0.0 <= self.p_start && self.p_start <= self.p_end && self.p_end <= 1.0) {
            return Err(Error::Config(format!(
                "need 0 <= p_start <= p_end <= 1, got {} and {}",
                self.p_start, self.p_end
            )));
        }
        Ok(())
    }

    /// Noise strengths of the sweep; both endpoints are hit exactly.
    pub fn p_grid(&self) -> Vec<f64> {
        if self.p_steps == 1 {
            return vec![self.p_start];
        }
        let n = (self.p_steps - 1) as f64;
        let span = self.p_end - self.p_start;
        let mut grid: Vec<f64> = (0..self.p_steps)
            .map(|i| self.p_start + span * i as f64 / n)
            .collect();
        grid[self.p_steps - 1] = self.p_end;
        grid
    }

    pub fn wants(&self, m: Measure) -> bool {
        self.measures.contains(&m)
    }

    /// Set one option by name. Keys match the long flag names; `-` and `_`
    /// are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "families" => self.families = parse_list(value)?,
            "p_start" => self.p_start = parse_value(&key, value)?,
            "p_end" => self.p_end = parse_value(&key, value)?,
            "p_steps" => self.p_steps = parse_value(&key, value)?,
            "measures" => self.measures = parse_list(value)?.into_iter().collect(),
            "restarts" => self.optimizer.restarts = parse_value(&key, value)?,
            "max_iterations" => self.optimizer.max_iterations = parse_value(&key, value)?,
            "f_tolerance" => self.optimizer.f_tolerance = parse_value(&key, value)?,
            "x_tolerance" => self.optimizer.x_tolerance = parse_value(&key, value)?,
            "top_k" => self.optimizer.top_k = parse_value(&key, value)?,
            "seed" => self.optimizer.seed = parse_value(&key, value)?,
            "grid_resolution" => self.optimizer.grid_resolution = parse_value(&key, value)?,
            "ddc_mode" => {
                self.ddc_mode = match value.trim() {
                    "nearest" | "min" => DdcMode::Nearest,
                    "farthest" | "max" => DdcMode::Farthest,
                    other => return Err(Error::Config(format!("bad ddc_mode `{other}`"))),
                }
            }
            "timing" => self.timing = parse_value(&key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Apply a `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_kv_file(&mut self, path: &Path) -> Result<()> {
        self.apply_kv_text(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub family: Family,
    pub p: f64,
    pub se: Option<f64>,
    pub ec: Option<f64>,
    pub ddc: Option<f64>,
    pub cds: Option<f64>,
    pub ic: Option<f64>,
    pub eb1: Option<f64>,
    pub eb2: Option<f64>,
    pub restarts_used: usize,
    /// Seed of this point's RNG streams.
    pub seed: u64,
    pub wall_ms: u64,
}

/// Seed for the point at `p_index` of `family`; independent of scheduling.
pub fn point_seed(seed: u64, family: Family, p_index: usize) -> u64 {
    derive_seed(seed, &[family.index(), p_index as u64])
}

/// Every requested functional at one (family, p).
pub fn evaluate_point(family: Family, p: f64, seed: u64, cfg: &RunConfig) -> Result<SweepPoint> {
    let start = Instant::now();
    let channel = family.channel(p)?;
    let opt = cfg.optimizer.with_seed(seed);
    let mut point = SweepPoint {
        family,
        p,
        se: None,
        ec: None,
        ddc: None,
        cds: None,
        ic: None,
        eb1: None,
        eb2: None,
        restarts_used: 0,
        seed,
        wall_ms: 0,
    };
    if cfg.wants(Measure::Se) || cfg.wants(Measure::Eb) {
        let se = saved_entanglement_of(&channel, &opt)?;
        point.restarts_used += se.restarts_used;
        if cfg.wants(Measure::Se) {
            point.se = Some(se.value);
        }
        if cfg.wants(Measure::Eb) {
            let eb = eb_bounds(&channel, &se.pairs)?;
            point.eb1 = Some(eb.eb1);
            point.eb2 = Some(eb.eb2);
        }
    }
    if cfg.wants(Measure::Ec) {
        let ec = entanglement_capacity_of(&channel, &opt)?;
        point.restarts_used += ec.restarts_used;
        point.ec = Some(ec.value);
    }
    if cfg.wants(Measure::Ddc) {
        point.ddc = Some(ddc_with_mode(&channel, cfg.ddc_mode)?.value);
    }
    if cfg.wants(Measure::Cds) {
        let c = cds(&channel, &opt)?;
        point.restarts_used += c.restarts_used;
        point.cds = Some(c.value);
    }
    if cfg.wants(Measure::Ic) {
        let v = ic(&channel, &opt)?;
        point.restarts_used += v.restarts_used;
        point.ic = Some(v.value);
    }
    if cfg.timing {
        point.wall_ms = start.elapsed().as_millis() as u64;
    }
    Ok(point)
}

/// Value of [`WORKERS_ENV`], or available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// All points of the sweep, sorted by family (in [`Family::ALL`] order) and
/// then by p.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<SweepPoint>> {
    run_sweep_with_workers(cfg, worker_count()?)
}

pub fn run_sweep_with_workers(cfg: &RunConfig, workers: usize) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    let grid = cfg.p_grid();
    let mut families = cfg.families.clone();
    families.sort_by_key(|f| f.index());
    families.dedup();
    let jobs: Vec<(Family, usize, f64)> = families
        .iter()
        .flat_map(|&f| grid.iter().enumerate().map(move |(i, &p)| (f, i, p)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut points = pool.install(|| {
        jobs.par_iter()
            .map(|&(f, i, p)| evaluate_point(f, p, point_seed(cfg.optimizer.seed, f, i), cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    points.sort_by(|a, b| a.family.index().cmp(&b.family.index()).then(a.p.total_cmp(&b.p)));
    Ok(points)
}

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

pub fn write_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for pt in points {
        w.write_record([
            pt.family.name().to_string(),
            fmt_real(pt.p),
            fmt_opt(pt.se),
            fmt_opt(pt.ec),
            fmt_opt(pt.ddc),
            fmt_opt(pt.cds),
            fmt_opt(pt.ic),
            fmt_opt(pt.eb1),
            fmt_opt(pt.eb2),
            pt.restarts_used.to_string(),
            pt.seed.to_string(),
            pt.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(points: &[SweepPoint], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(points, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::MalformedCsv(format!("line {line}: bad `{}` value `{raw}`", CSV_HEADER[i])))
}

fn opt_field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<Option<f64>> {
    if rec.get(i).unwrap_or("").is_empty() {
        Ok(None)
    } else {
        field(rec, i, line).map(Some)
    }
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepPoint>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::MalformedCsv(format!(
            "header must be `{}`",
            CSV_HEADER.join(",")
        )));
    }
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::MalformedCsv(format!("line {line}: expected 12 fields")));
        }
        let family = rec[0]
            .parse()
            .map_err(|_| Error::MalformedCsv(format!("line {line}: unknown family `{}`", &rec[0])))?;
        points.push(SweepPoint {
            family,
            p: field(&rec, 1, line)?,
            se: opt_field(&rec, 2, line)?,
            ec: opt_field(&rec, 3, line)?,
            ddc: opt_field(&rec, 4, line)?,
            cds: opt_field(&rec, 5, line)?,
            ic: opt_field(&rec, 6, line)?,
            eb1: opt_field(&rec, 7, line)?,
            eb2: opt_field(&rec, 8, line)?,
            restarts_used: field(&rec, 9, line)?,
            seed: field(&rec, 10, line)?,
            wall_ms: field(&rec, 11, line)?,
        });
    }
    Ok(points)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<SweepPoint>> {
    read_csv(std::fs::File::open(path)?)
}
