//! Concurrence of a few textbook states, and how local noise erodes a Bell
//! pair.

use entsave::channels::Family;
use entsave::entanglement::{concurrence, concurrence_via_omega};
use entsave::states::{random_mixed, stream, DensityMatrix, PureState};

fn main() -> entsave::Result<()> {
    let bell = PureState::bell_phi_plus().to_density();
    println!("C(|Φ+⟩)       = {:.6}", concurrence(&bell)?.value());
    println!("C(|00⟩)       = {:.6}", concurrence(&PureState::basis(4, 0)?.to_density())?.value());
    for w in [0.2, 1.0 / 3.0, 0.6, 0.9] {
        let werner = bell.mix(&DensityMatrix::maximally_mixed(4), w);
        println!("C(Werner {w:.3}) = {:.6}", concurrence(&werner)?.value());
    }

    println!("\nBell pair under local noise:");
    println!("{:>5} {}", "p", Family::ALL.map(|f| format!("{:>8}", f.name())).join(""));
    for i in 0..=5 {
        let p = i as f64 / 5.0;
        let row: Vec<String> = Family::ALL
            .iter()
            .map(|f| {
                let out = f.channel(p)?.local_apply(&bell)?;
                Ok(format!("{:>8.4}", concurrence(&out)?.value()))
            })
            .collect::<entsave::Result<_>>()?;
        println!("{p:>5.2} {}", row.join(""));
    }

    // Two independent eigenvalue routes give the same number.
    let rho = random_mixed(4, &mut stream(7, 0));
    let a = concurrence(&rho)?.value();
    let b = concurrence_via_omega(rho.matrix())?;
    println!("\nrandom mixed state: {a:.12} vs ω route {b:.12}");
    Ok(())
}
