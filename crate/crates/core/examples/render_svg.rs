//! Picture of the partition for the polynomial example with a circle of radius
//! 0.5 drawn on top.
//!
//!     cargo run --release --example render_svg -- out.svg

use pisynth::dataset::{gen_dyadic_grid, SystemOracle};
use pisynth::svg::render_svg;
use pisynth::synthesis::{synthesize, SynthConfig};
use pisynth::tree::PartitionTree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("nonlinear2d.svg"));
    let sys = SystemOracle::nonlinear2d();
    let data = gen_dyadic_grid(&sys, &sys.domain, 0.01)?;
    let result = synthesize(
        PartitionTree::new(&sys.domain, &data)?,
        &data,
        &SynthConfig::new(sys.lipschitz, 0.01),
    )?;

    let circle: Vec<[f64; 2]> = (0..=128)
        .map(|k| {
            let a = k as f64 * std::f64::consts::TAU / 128.0;
            [0.5 * a.cos(), 0.5 * a.sin()]
        })
        .collect();
    let svg = render_svg(&result.tree, Some(&circle)).expect("two-dimensional tree");
    std::fs::write(&out, svg)?;
    println!(
        "volume {:.4}, {} leaves, written to {}",
        result.volume,
        result.tree.leaves().len(),
        out.display()
    );
    Ok(())
}
