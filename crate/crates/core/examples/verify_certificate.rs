//! Writes a result file, reloads it and checks it without any access to the
//! synthesis state. A tampered copy is rejected, and a trajectory simulation
//! with the true map agrees with the certificate.
//!
//!     cargo run --release --example verify_certificate

use pisynth::dataset::{gen_uniform, SystemOracle};
use pisynth::document::{ResultDocument, RunManifest};
use pisynth::synthesis::{synthesize, SynthConfig};
use pisynth::tree::{Label, PartitionTree};
use pisynth::verify::{check_fixpoint, monte_carlo_invariance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = SystemOracle::linear2d();
    let data = gen_uniform(&sys, &sys.domain, 5000, 3)?;
    let config = SynthConfig::new(sys.lipschitz, 0.01);
    let result = synthesize(PartitionTree::new(&sys.domain, &data)?, &data, &config)?;

    let dir = std::env::temp_dir().join("pisynth-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("linear.json");
    ResultDocument::new(
        &result,
        &config,
        RunManifest {
            rows: data.len(),
            ..Default::default()
        },
    )
    .save(&path)?;

    let doc = ResultDocument::load(&path)?;
    let cert = check_fixpoint(&doc, sys.lipschitz)?;
    println!(
        "reloaded {}: certified {} over {} leaves",
        path.display(),
        cert.passed,
        cert.checked_leaves
    );

    let mc = monte_carlo_invariance(&doc.pi_set, &sys, 100_000, 50, 11)?;
    println!(
        "simulation: {} trajectories of 50 steps, escapes found: {}",
        mc.checked_leaves, !mc.passed
    );

    // Shrink one sample radius so its ball no longer contains the target cube.
    let mut tampered = doc.clone();
    let id = tampered
        .tree
        .nodes
        .iter()
        .enumerate()
        .position(|(i, n)| {
            n.label == Label::Included && !doc.tree.nodes.iter().any(|m| m.parent == Some(i))
        })
        .expect("an included leaf");
    tampered.tree.nodes[id].sample_radius *= 0.5;
    let bad = check_fixpoint(&tampered, sys.lipschitz)?;
    let failure = bad.first_failure.expect("tampering is detected");
    println!(
        "tampered copy: certified {}, leaf {:?}: {}",
        bad.passed, failure.leaf_id, failure.reason
    );
    Ok(())
}
