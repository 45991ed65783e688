//! A small sweep written to CSV, read back, and turned into a plot script.
//!
//! Set ENTSAVE_WORKERS to control the thread count.

use entsave::plot::emit_plot_script;
use entsave::sweep::{read_csv_file, run_sweep, write_csv_file, RunConfig};

fn main() -> entsave::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.apply_kv_text(
        "families = ad,pf
         p_steps = 5
         measures = se,ec,ddc,cds,eb
         restarts = 8",
    )?;
    let points = run_sweep(&cfg)?;

    let dir = std::env::temp_dir().join("entsave-example");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("results.csv");
    write_csv_file(&points, &csv)?;
    assert_eq!(read_csv_file(&csv)?, points);

    for pt in &points {
        println!(
            "{:<3} p={:.2}  SE {:.5}  EC {:.5}  DDC {:.5}  CDS {:.5}  EB1 {:.5}",
            pt.family.name(),
            pt.p,
            pt.se.unwrap_or(f64::NAN),
            pt.ec.unwrap_or(f64::NAN),
            pt.ddc.unwrap_or(f64::NAN),
            pt.cds.unwrap_or(f64::NAN),
            pt.eb1.unwrap_or(f64::NAN)
        );
    }
    let script = dir.join("figures.script");
    emit_plot_script(&csv, &script)?;
    println!("\n{} and {}", csv.display(), script.display());
    Ok(())
}
