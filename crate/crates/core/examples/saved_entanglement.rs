//! Saved entanglement and entanglement capacity for one family.
//!
//! `cargo run --release --example saved_entanglement -- ad 0.5`

use entsave::channels::Family;
use entsave::measures::{entanglement_capacity, saved_entanglement};
use entsave::optimize::OptimizerConfig;

fn main() -> entsave::Result<()> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("ad").parse()?;
    let p: f64 = args.next().map_or(Ok(0.5), |s| s.parse()).map_err(|_| entsave::Error::Config("p must be a number".into()))?;
    let cfg = OptimizerConfig::default().with_restarts(20);

    let se = saved_entanglement(family, p, &cfg)?;
    let ec = entanglement_capacity(family, p, &cfg)?;
    println!("{} at p = {p}", family.description());
    println!("  SE = {:.8}   ({} restarts, {} did not converge)", se.value, se.restarts_used, se.non_converged);
    println!("  EC = {:.8}", ec.value);
    for (i, pair) in se.pairs.iter().enumerate() {
        let u = pair.unitary_angles;
        println!(
            "  pair {i}: U(θ={:.4}, φ={:.4}, λ={:.4})  gain {:.8}",
            u.theta, u.phi, u.lambda, pair.objective_value
        );
    }
    Ok(())
}
