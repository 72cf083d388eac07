//! Volume of the synthesized set against the number of uniformly drawn samples for
//! the polynomial example system, ten datasets per size.
//!
//!     cargo run --release --example nonlinear_uniform

use pisynth::dataset::{gen_uniform, SystemOracle};
use pisynth::document::{ResultDocument, RunManifest};
use pisynth::report::{summarize, write_csv};
use pisynth::synthesis::{synthesize, SynthConfig};
use pisynth::tree::PartitionTree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = SystemOracle::nonlinear2d();
    let config = SynthConfig::new(sys.lipschitz, 0.01);
    let mut docs = Vec::new();
    for m in (2000..=10_000).step_by(2000) {
        for seed in 0..10 {
            let data = gen_uniform(&sys, &sys.domain, m, seed)?;
            let result = synthesize(PartitionTree::new(&sys.domain, &data)?, &data, &config)?;
            let manifest = RunManifest {
                rows: m,
                system: Some(sys.name.clone()),
                seed: Some(seed),
                ..Default::default()
            };
            docs.push(ResultDocument::new(&result, &config, manifest));
        }
    }
    // One row per sample size; `empty` counts runs that ended with no set.
    write_csv(&summarize(&docs), std::io::stdout())?;
    Ok(())
}
