//! Run the quick property suite and print its report.

use entsave::verify::{verify, Level};

fn main() -> entsave::Result<()> {
    let report = verify(Level::Quick)?;
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
    Ok(())
}
