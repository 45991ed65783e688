//! Build each noise family, check its Kraus set, and push a qubit through it.

use entsave::channels::{channel_distance, Family, KrausChannel};
use entsave::states::{bloch_to_density, density_to_bloch, BlochVector};

fn main() -> entsave::Result<()> {
    let plus_y = bloch_to_density(BlochVector::new(0.0, 1.0, 0.0)?);
    println!("input Bloch vector (0, 1, 0), p = 0.3\n");
    println!("{:<4} {:<24} {:>9} {:>28} {:>10}", "name", "channel", "kraus", "output Bloch vector", "D(I, Λ)");
    for fam in Family::ALL {
        let ch = fam.channel(0.3)?;
        let out = density_to_bloch(&ch.apply(&plus_y)?)?;
        let dist = channel_distance(&KrausChannel::identity(2), &ch)?;
        println!(
            "{:<4} {:<24} {:>9} ({:>7.4}, {:>7.4}, {:>7.4}) {:>10.4}",
            fam.name(),
            fam.description(),
            format!("{} ops", ch.kraus().len()),
            out.x,
            out.y,
            out.z,
            dist
        );
        assert!(ch.completeness_defect() < 1e-12);
    }

    // The local channel acts on two qubits with the product Kraus set.
    let local = Family::AmplitudeDamping.channel(0.3)?.local();
    println!("\nad ⊗ ad has {} Kraus operators on dim {}", local.kraus().len(), local.dim());
    Ok(())
}
