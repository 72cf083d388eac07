//! How many samples the grid and the uniform schemes need as the resolution
//! shrinks, on the linear example's domain.
//!
//!     cargo run --example sample_bounds

use pisynth::bounds::{bounds_report, BoundQuery};
use pisynth::dataset::SystemOracle;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let domain = SystemOracle::linear2d().domain;
    println!(
        "{:>8} {:>14} {:>14} {:>16}",
        "tau", "grid", "uniform", "verbatim"
    );
    for tau in [0.1, 0.05, 0.02, 0.01, 0.005, 0.001] {
        let q = BoundQuery::new(0.05, domain.volume(), domain.dim(), tau)?;
        let r = bounds_report(&q)?;
        println!(
            "{tau:>8} {:>14} {:>14} {:>16.1}",
            r.deterministic, r.canonical, r.sample_count_verbatim
        );
    }
    println!(
        "\nthe verbatim column divides by a negative logarithm; see the warnings in the report"
    );
    Ok(())
}
