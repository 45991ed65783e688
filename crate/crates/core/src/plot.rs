//! Gnuplot script generation from sweep results.
//!
//! The script carries its data inline, so it renders with nothing but the
//! script itself: `gnuplot figures.script` writes `figures.png`.

use std::fmt::Write as _;
use std::path::Path;

use crate::channels::Family;
use crate::error::{Error, Result};
use crate::sweep::{read_csv_file, SweepPoint};

/// Curves drawn in every panel, in datablock column order after `p`.
pub const CURVES: [&str; 6] = ["SE", "EC", "DDC", "CDS", "IC", "EB1"];

fn cell(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.10e}"),
        None => "NaN".to_string(),
    }
}

/// A self-contained gnuplot script with one panel per family present in
/// `points`. Rows are reordered by (family, p) first, so the output depends
/// only on the set of rows.
pub fn plot_script(points: &[SweepPoint], image: &str) -> Result<String> {
    if points.is_empty() {
        return Err(Error::MalformedCsv("no data rows to plot".into()));
    }
    let mut rows: Vec<&SweepPoint> = points.iter().collect();
    rows.sort_by(|a, b| a.family.index().cmp(&b.family.index()).then(a.p.total_cmp(&b.p)));
    let families: Vec<Family> = Family::ALL
        .into_iter()
        .filter(|f| rows.iter().any(|r| r.family == *f))
        .collect();

    let mut s = String::new();
    let cols = families.len().min(3);
    let grid_rows = families.len().div_ceil(cols);
    let _ = writeln!(s, "# entsave sweep figures: {} panel(s)", families.len());
    for fam in &families {
        let _ = writeln!(s, "${} << EOD", fam.name());
        let _ = writeln!(s, "# p {}", CURVES.join(" "));
        for r in rows.iter().filter(|r| r.family == *fam) {
            let vals = [r.se, r.ec, r.ddc, r.cds, r.ic, r.eb1].map(cell);
            let _ = writeln!(s, "{:.10e} {}", r.p, vals.join(" "));
        }
        let _ = writeln!(s, "EOD");
    }
    let _ = writeln!(s, "set terminal pngcairo size {},{}", 480 * cols, 360 * grid_rows);
    let _ = writeln!(s, "set output '{}'", image.replace('\'', ""));
    let _ = writeln!(s, "set datafile missing 'NaN'");
    let _ = writeln!(s, "set multiplot layout {grid_rows},{cols}");
    let _ = writeln!(s, "set xrange [0:1]");
    let _ = writeln!(s, "set xlabel 'p'");
    let _ = writeln!(s, "set ylabel 'ebits'");
    let _ = writeln!(s, "set key top right");
    for fam in &families {
        let _ = writeln!(s, "set title '{}'", fam.description());
        let series: Vec<String> = CURVES
            .iter()
            .enumerate()
            .map(|(i, name)| {
                format!(
                    "${} using 1:{} with linespoints title '{}'",
                    fam.name(),
                    i + 2,
                    name
                )
            })
            .collect();
        let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

/// Read a sweep CSV and write its plot script. Nothing is written when the
/// CSV is malformed or has no rows.
pub fn emit_plot_script(csv: &Path, out: &Path) -> Result<()> {
    let points = read_csv_file(csv)?;
    let image = out.with_extension("png");
    let image = image.file_name().and_then(|n| n.to_str()).unwrap_or("figures.png");
    let script = plot_script(&points, image)?;
    std::fs::write(out, script)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{write_csv_file, CSV_HEADER};

    fn pt(family: Family, p: f64) -> SweepPoint {
        SweepPoint {
            family,
            p,
            se: Some(p * (1.0 - p)),
            ec: Some(1.0 - p),
            ddc: None,
            cds: Some(p),
            ic: Some(0.5 * p),
            eb1: Some(p * (1.0 - p)),
            eb2: Some(p * (1.0 - p)),
            restarts_used: 3,
            seed: 1,
            wall_ms: 0,
        }
    }

    #[test]
    fn five_families_give_five_panels() {
        let pts: Vec<_> = Family::ALL
            .into_iter()
            .flat_map(|f| [0.0, 0.5, 1.0].map(|p| pt(f, p)))
            .collect();
        let s = plot_script(&pts, "x.png").unwrap();
        assert_eq!(s.matches("set title").count(), 5);
        assert_eq!(s.matches("\nplot ").count(), 5);
        for f in Family::ALL {
            assert!(s.contains(&format!("${} << EOD", f.name())));
        }
        assert!(s.contains("NaN"));
    }

    #[test]
    fn order_of_rows_does_not_matter() {
        let mut pts = vec![pt(Family::BitFlip, 0.5), pt(Family::AmplitudeDamping, 0.0), pt(Family::BitFlip, 0.0)];
        let a = plot_script(&pts, "x.png").unwrap();
        pts.reverse();
        assert_eq!(a, plot_script(&pts, "x.png").unwrap());
    }

    #[test]
    fn empty_csv_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("empty.csv");
        std::fs::write(&csv, format!("{}\n", CSV_HEADER.join(","))).unwrap();
        let out = dir.path().join("fig.script");
        assert!(emit_plot_script(&csv, &out).is_err());
        assert!(!out.exists());
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("r.csv");
        write_csv_file(&[pt(Family::PhaseFlip, 0.25), pt(Family::Depolarizing, 0.75)], &csv).unwrap();
        let out = dir.path().join("fig.script");
        emit_plot_script(&csv, &out).unwrap();
        let first = std::fs::read(&out).unwrap();
        emit_plot_script(&csv, &out).unwrap();
        assert_eq!(first, std::fs::read(&out).unwrap());
        assert!(String::from_utf8(first).unwrap().contains("set output 'fig.png'"));
    }
}
