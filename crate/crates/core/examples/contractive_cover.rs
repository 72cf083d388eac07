//! For a map that contracts a polytope S by lambda, any grid of balls covering
//! rho*S is invariant as long as rho sits in the window returned by
//! `invariance_window`. Checked here for x+ = 0.5x on the unit square.
//!
//!     cargo run --example contractive_cover

use pisynth::bounds::PolytopeCSet;
use pisynth::geometry::Cube;
use pisynth::verify::check_ball_cover;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = PolytopeCSet::unit_max_ball(2);
    let (lambda, lipschitz) = (0.5, 0.5);
    println!("u_bar = {}", s.u_bar());

    for r in [0.05, 0.1, 0.2, 0.3, 0.4] {
        let Some((lo, hi)) = s.invariance_window(lambda, lipschitz, r) else {
            println!("r = {r}: no admissible level");
            continue;
        };
        // Cover rho*S with balls of radius r, rho at the top of the window
        // rounded down to a whole number of balls.
        let per_side = (hi / (2.0 * r)).floor() as usize;
        let rho = 2.0 * r * per_side as f64;
        let mut balls = Vec::new();
        let mut successors = Vec::new();
        for i in 0..per_side {
            for j in 0..per_side {
                let c = vec![-rho + r * (2 * i + 1) as f64, -rho + r * (2 * j + 1) as f64];
                successors.push(c.iter().map(|v| lambda * v).collect());
                balls.push(Cube::new(c, r)?);
            }
        }
        let cert = check_ball_cover(&balls, &successors, lipschitz)?;
        println!(
            "r = {r}: window [{lo:.3}, {hi:.3}], rho = {rho:.2} with {} balls, rho in window: {}, cover certified: {}",
            balls.len(),
            rho >= lo,
            cert.passed
        );
    }
    Ok(())
}
