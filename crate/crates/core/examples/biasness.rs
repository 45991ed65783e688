//! The three biasness measures across the families at a few strengths.

use entsave::channels::Family;
use entsave::measures::{cds, ddc, ddc_with_mode, ic, DdcMode};
use entsave::optimize::OptimizerConfig;

fn main() -> entsave::Result<()> {
    let cfg = OptimizerConfig::default().with_restarts(10);
    println!("{:<4} {:>5} {:>10} {:>10} {:>10} {:>10}", "", "p", "DDC", "DDC(max)", "CDS", "IC");
    for fam in Family::ALL {
        for p in [0.25, 0.5, 0.75] {
            let ch = fam.channel(p)?;
            println!(
                "{:<4} {:>5.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
                fam.name(),
                p,
                ddc(&ch)?.value,
                ddc_with_mode(&ch, DdcMode::Farthest)?.value,
                cds(&ch, &cfg)?.value,
                ic(&ch, &cfg)?.value
            );
        }
    }
    Ok(())
}
