//! Synthesis from plain CSV rows, as they would come from measurements. The map
//! here is a damped rotation whose max-norm Lipschitz constant is 0.9.
//!
//!     cargo run --release --example custom_dataset

use std::fmt::Write;

use pisynth::dataset::read_dataset;
use pisynth::domain::Domain;
use pisynth::synthesis::{synthesize, SynthConfig, UpdateMode};
use pisynth::tree::PartitionTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn step(x: [f64; 2]) -> [f64; 2] {
    [0.6 * x[0] - 0.3 * x[1], 0.3 * x[0] + 0.6 * x[1]]
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut csv = String::from("x1,x2,xp1,xp2\n");
    for _ in 0..20_000 {
        let x = [rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)];
        let xp = step(x);
        writeln!(csv, "{},{},{},{}", x[0], x[1], xp[0], xp[1])?;
    }
    let data = read_dataset(&csv, Some(2))?;

    // A 4 x 2 rectangle is split into two root cubes.
    let domain: Domain = "-2,-1:2,1".parse()?;
    println!(
        "domain {domain} with {} root cubes, {} samples",
        domain.roots().len(),
        data.len()
    );

    for mode in [UpdateMode::Sequential, UpdateMode::Batch] {
        let config = SynthConfig::new(0.9, 0.01).with_mode(mode);
        let r = synthesize(PartitionTree::new(&domain, &data)?, &data, &config)?;
        println!(
            "{mode:?}: volume {:.4}, {} sweeps, {:?}",
            r.volume, r.sweeps, r.leaf_counts
        );
    }
    Ok(())
}
