use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError, SystemOracle};
use crate::domain::Domain;
use crate::geometry::Cube;

/// `m` states drawn i.i.d. uniformly over `domain` with a seeded ChaCha8 stream,
/// paired with their successors under `oracle`.
pub fn gen_uniform(
    oracle: &SystemOracle,
    domain: &Domain,
    m: usize,
    seed: u64,
) -> Result<Dataset, DatasetError> {
    if m == 0 {
        return Err(DatasetError::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    check_dims(oracle, domain)?;
    let n = domain.dim();
    let roots = &domain.roots().boxes;
    let total = domain.volume();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(m * n);
    let mut xps = Vec::with_capacity(m * n);
    for _ in 0..m {
        let root = if roots.len() == 1 {
            &roots[0]
        } else {
            let mut pick = rng.random::<f64>() * total;
            roots
                .iter()
                .find(|c| {
                    pick -= c.volume();
                    pick < 0.0
                })
                .unwrap_or(&roots[roots.len() - 1])
        };
        let x: Vec<f64> = root
            .center
            .iter()
            .map(|c| c - root.radius + 2.0 * root.radius * rng.random::<f64>())
            .collect();
        xps.extend(oracle.eval(&x));
        xs.extend(x);
    }
    let mut data = Dataset::from_flat(n, xs, xps);
    data.set_metadata("system", &oracle.name);
    data.set_metadata("mode", "uniform");
    data.set_metadata("seed", seed);
    data.set_metadata("m", m);
    data.set_metadata("lipschitz", oracle.lipschitz);
    data.set_metadata("domain", domain);
    Ok(data)
}

/// One sample at the center of every cube the partition tree can create while the
/// target radius stays at or above `tau`, so that every division finds a sample
/// exactly at its target center.
///
/// Centers are produced with the same [`Cube::split`] arithmetic the tree uses, so
/// the match is bit-exact. Samples are ordered level by level, roots first.
pub fn gen_dyadic_grid(
    oracle: &SystemOracle,
    domain: &Domain,
    tau: f64,
) -> Result<Dataset, DatasetError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(DatasetError::InvalidParameter(format!(
            "tau must be positive, got {tau}"
        )));
    }
    check_dims(oracle, domain)?;
    let n = domain.dim();
    let mut xs = Vec::new();
    let mut xps = Vec::new();
    let mut level: Vec<Cube> = domain.roots().boxes.clone();
    loop {
        for c in &level {
            xps.extend(oracle.eval(&c.center));
            xs.extend_from_slice(&c.center);
        }
        level = level
            .iter()
            .filter(|c| c.radius / 2.0 >= tau)
            .flat_map(Cube::split)
            .collect();
        if level.is_empty() {
            break;
        }
    }
    let mut data = Dataset::from_flat(n, xs, xps);
    data.set_metadata("system", &oracle.name);
    data.set_metadata("mode", "grid");
    data.set_metadata("tau", tau);
    data.set_metadata("m", data.len());
    data.set_metadata("lipschitz", oracle.lipschitz);
    data.set_metadata("domain", domain);
    Ok(data)
}

fn check_dims(oracle: &SystemOracle, domain: &Domain) -> Result<(), DatasetError> {
    if oracle.dim() != domain.dim() {
        return Err(DatasetError::InvalidParameter(format!(
            "system {} is {}-dimensional but the domain is {}-dimensional",
            oracle.name,
            oracle.dim(),
            domain.dim()
        )));
    }
    Ok(())
}
