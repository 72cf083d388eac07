//! Grid data for the linear example system at resolution 0.001, then synthesis
//! and an independent re-check of the result.
//!
//!     cargo run --release --example linear_deterministic

use std::time::Instant;

use pisynth::bounds::deterministic_sample_bound;
use pisynth::dataset::{gen_dyadic_grid, SystemOracle};
use pisynth::document::{ResultDocument, RunManifest};
use pisynth::synthesis::{synthesize, SynthConfig};
use pisynth::tree::PartitionTree;
use pisynth::verify::check_fixpoint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = SystemOracle::linear2d();
    let tau = 0.001;
    let start = Instant::now();

    let data = gen_dyadic_grid(&sys, &sys.domain, tau)?;
    println!("system      {sys}");
    println!(
        "samples     {} (grid bound {})",
        data.len(),
        deterministic_sample_bound(sys.domain.volume(), 2, tau)?
    );

    let config = SynthConfig::new(sys.lipschitz, tau);
    let result = synthesize(PartitionTree::new(&sys.domain, &data)?, &data, &config)?;
    println!(
        "volume      {:.4} of {}",
        result.volume,
        sys.domain.volume()
    );
    println!("sweeps      {} ({:?})", result.sweeps, result.terminated_by);
    println!("leaves      {:?}", result.leaf_counts);

    let doc = ResultDocument::new(&result, &config, RunManifest::default());
    let cert = check_fixpoint(&doc, sys.lipschitz)?;
    println!(
        "certified   {} ({} leaves checked)",
        cert.passed, cert.checked_leaves
    );
    println!("elapsed     {:.2?}", start.elapsed());
    Ok(())
}
