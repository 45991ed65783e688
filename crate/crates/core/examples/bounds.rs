//! EB1 and EB2 from the optimizer pairs of an SE run.

use entsave::channels::Family;
use entsave::measures::{eb_bounds, saved_entanglement};
use entsave::optimize::OptimizerConfig;

fn main() -> entsave::Result<()> {
    let cfg = OptimizerConfig::default().with_restarts(20);
    for family in [Family::AmplitudeDamping, Family::BitFlip] {
        for p in [0.3, 0.6] {
            let ch = family.channel(p)?;
            let se = saved_entanglement(family, p, &cfg)?;
            let eb = eb_bounds(&ch, &se.pairs)?;
            println!("{} p={p}: SE {:.6} <= EB1 {:.6} <= EB2 {:.6}", family.name(), se.value, eb.eb1, eb.eb2);
            for b in &eb.per_pair {
                println!(
                    "    p1_max {:.4}  C(Λ(ρ_max)) {:.2e}  best p1 {:.4}",
                    b.p1_max, b.base_concurrence, b.decomposition.p1
                );
            }
        }
    }
    Ok(())
}
