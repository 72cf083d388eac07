use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pisynth::bounds::{uniform_sample_bound, BoundForm, BoundQuery, PolytopeCSet};
use pisynth::dataset::{gen_dyadic_grid, gen_uniform, Dataset, SamplePair, SystemOracle};
use pisynth::document::{ResultDocument, RunManifest};
use pisynth::domain::Domain;
use pisynth::geometry::{
    classify_coverage, max_norm_dist, successor_box, BoxList, CoverageClass, Cube, Rect,
};
use pisynth::synthesis::{synthesize, SynthConfig, UpdateMode};
use pisynth::tree::{Label, PartitionTree};
use pisynth::verify::check_fixpoint;

fn rect(n: usize) -> impl Strategy<Value = Rect> {
    prop::collection::vec((-2.0f64..2.0, 0.0f64..2.0), n).prop_map(|v| {
        Rect::new(
            v.iter().map(|p| p.0).collect(),
            v.iter().map(|p| p.0 + p.1).collect(),
        )
        .unwrap()
    })
}

fn interiors_overlap(a: &Rect, b: &Rect) -> bool {
    a.lo.iter()
        .zip(&a.hi)
        .zip(b.lo.iter().zip(&b.hi))
        .all(|((al, ah), (bl, bh))| al.max(*bl) < ah.min(*bh) - 1e-12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn subtraction_is_exact((q, c) in (1usize..4).prop_flat_map(|n| (rect(n), rect(n)))) {
        let frags = q.subtract(&c).unwrap();
        prop_assert!(frags.len() <= 2 * q.dim());
        let inter = q.intersect(&c).unwrap().map_or(0.0, |r| r.volume());
        let area: f64 = frags.iter().map(Rect::volume).sum();
        prop_assert!((area - (q.volume() - inter)).abs() <= 1e-9 * (1.0 + q.volume()));
        for (i, f) in frags.iter().enumerate() {
            prop_assert!(q.contains_rect(f));
            prop_assert!(!interiors_overlap(f, &c));
            for g in &frags[i + 1..] {
                prop_assert!(!interiors_overlap(f, g));
            }
        }
    }

    #[test]
    fn successor_radius_is_linear(r in 0.0f64..10.0, l in 0.001f64..10.0, k in 0.0f64..5.0) {
        let x = [0.3, -0.7];
        let b = successor_box(&x, r, l).unwrap();
        prop_assert_eq!(b.radius, l * r);
        prop_assert_eq!(&b.center[..], &x[..]);
        let scaled = successor_box(&x, k * r, l).unwrap();
        prop_assert!((scaled.radius - k * b.radius).abs() <= 1e-12 * (1.0 + scaled.radius));
    }

    #[test]
    fn psi_is_a_gauge(x in prop::collection::vec(-5.0f64..5.0, 3), y in prop::collection::vec(-5.0f64..5.0, 3), a in 0.0f64..10.0) {
        let box3 = PolytopeCSet::unit_max_ball(3);
        let scaled: Vec<f64> = x.iter().map(|v| a * v).collect();
        prop_assert_eq!(box3.psi(&scaled).unwrap(), a * box3.psi(&x).unwrap());
        for s in [box3, PolytopeCSet::unit_l1_ball(3)] {
            let sum: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p + q).collect();
            prop_assert!(s.psi(&sum).unwrap() <= s.psi(&x).unwrap() + s.psi(&y).unwrap() + 1e-12);
            prop_assert!(s.psi(&x).unwrap() >= 0.0);
        }
        let inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert_eq!(PolytopeCSet::unit_max_ball(3).contains(&x).unwrap(), inf <= 1.0);
    }

    #[test]
    fn canonical_bound_is_positive(delta in 0.001f64..=1.0, tau in 0.001f64..0.5, n in 1usize..4) {
        let q = BoundQuery::new(delta, 4.0, n, tau).unwrap();
        let v = uniform_sample_bound(&q, BoundForm::Canonical).unwrap();
        prop_assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn coverage_verdict_matches_point_membership(seed in any::<u64>()) {
        // Union of unit-lattice cells; the query is classified exactly, then probed
        // at its cell centers.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells: Vec<Cube> = (0..36)
            .filter(|_| rng.random::<f64>() < 0.6)
            .map(|k| Cube::new(vec![(k % 6) as f64 + 0.5, (k / 6) as f64 + 0.5], 0.5).unwrap())
            .collect();
        let union = BoxList::new(cells);
        let q = Cube::new(vec![rng.random_range(1..5) as f64, rng.random_range(1..5) as f64], 1.0).unwrap();
        let probes = [[-0.5, -0.5], [0.5, -0.5], [-0.5, 0.5], [0.5, 0.5]];
        let inside = probes
            .iter()
            .filter(|p| union.contains_point(&[q.center[0] + p[0], q.center[1] + p[1]]))
            .count();
        let expected = match inside {
            0 => CoverageClass::Disjoint,
            4 => CoverageClass::FullyCovered,
            _ => CoverageClass::Partial,
        };
        let got = classify_coverage(&q, &union).unwrap();
        // Corner contact alone is a touch, not coverage.
        prop_assert!(got == expected || (expected == CoverageClass::Disjoint && got == CoverageClass::Partial));
    }
}

#[test]
fn grid_nearest_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, m) in [(1, 500), (2, 5000), (3, 2000), (4, 800)] {
        let pairs: Vec<SamplePair> = (0..m)
            .map(|j| {
                // Clustered points with exact duplicates to stress tie handling.
                let x: Vec<f64> = if j % 10 == 9 {
                    vec![0.25; n]
                } else {
                    (0..n)
                        .map(|_| (rng.random::<f64>() * 2.0 - 1.0).powi(3))
                        .collect()
                };
                SamplePair::new(x, vec![0.0; n])
            })
            .collect();
        let d = Dataset::from_pairs(pairs).unwrap();
        for _ in 0..1000 {
            let q: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0 - 1.5).collect();
            assert_eq!(d.nearest(&q).unwrap(), d.nearest_linear(&q).unwrap());
        }
        assert_eq!(d.nearest(&[0.25; 4][..n]).unwrap().index, 9);
    }
}

#[test]
fn generated_pairs_match_the_map() {
    for sys in [SystemOracle::linear2d(), SystemOracle::nonlinear2d()] {
        let d = gen_uniform(&sys, &sys.domain, 100_000, 17).unwrap();
        assert_eq!(d.len(), 100_000);
        for j in 0..d.len() {
            assert!(sys.domain.contains_point(d.x(j)));
            assert_eq!(d.x_plus(j), sys.eval(d.x(j)).as_slice());
        }
    }
}

#[test]
fn synthesis_is_deterministic() {
    let sys = SystemOracle::nonlinear2d();
    let d = gen_uniform(&sys, &sys.domain, 10_000, 4).unwrap();
    for mode in [UpdateMode::Sequential, UpdateMode::Batch] {
        let cfg = SynthConfig::new(sys.lipschitz, 0.01).with_mode(mode);
        let a = synthesize(PartitionTree::new(&sys.domain, &d).unwrap(), &d, &cfg).unwrap();
        let b = synthesize(PartitionTree::new(&sys.domain, &d).unwrap(), &d, &cfg).unwrap();
        assert_eq!(a.tree.to_records(), b.tree.to_records());
        assert_eq!(a.volume, b.volume);
    }
}

#[test]
fn tree_invariants_after_synthesis() {
    let sys = SystemOracle::linear2d();
    for (d, tau) in [
        (gen_uniform(&sys, &sys.domain, 3000, 8).unwrap(), 0.005),
        (gen_dyadic_grid(&sys, &sys.domain, 0.01).unwrap(), 0.01),
    ] {
        let r = synthesize(
            PartitionTree::new(&sys.domain, &d).unwrap(),
            &d,
            &SynthConfig::new(sys.lipschitz, tau),
        )
        .unwrap();
        let t = &r.tree;
        let leaf_volume: f64 = t
            .leaves()
            .iter()
            .map(|&id| t.nodes()[id].target_box().volume())
            .sum();
        assert!((leaf_volume - sys.domain.volume()).abs() < 1e-12);
        for n in t.nodes() {
            assert!(
                max_norm_dist(&n.target_center, &n.sample.x) + n.target_radius
                    <= n.sample_radius + 1e-12
            );
            if n.label == Label::Unknown {
                assert!(n.target_radius / 2.0 < tau);
            }
            for &c in &n.children {
                assert_eq!(t.nodes()[c].target_radius, n.target_radius / 2.0);
                assert!(n
                    .target_box()
                    .to_rect()
                    .contains_rect(&t.nodes()[c].target_box().to_rect()));
            }
        }
        for tr in t.transitions() {
            assert_eq!(tr.from, Label::Included);
        }
    }
}

#[test]
fn both_update_modes_certify_on_other_domains() {
    // Scaling map on a two-cube domain: roots side by side.
    let domain: Domain = "-2,-1:2,1".parse().unwrap();
    assert_eq!(domain.roots().len(), 2);
    let sys = SystemOracle::linear(vec![vec![0.6, 0.3], vec![-0.2, 0.5]], domain.clone()).unwrap();
    let d = gen_uniform(&sys, &domain, 8000, 2).unwrap();
    for mode in [UpdateMode::Sequential, UpdateMode::Batch] {
        let cfg = SynthConfig::new(sys.lipschitz, 0.02).with_mode(mode);
        let r = synthesize(PartitionTree::new(&domain, &d).unwrap(), &d, &cfg).unwrap();
        assert!(r.volume > 0.0);
        let doc = ResultDocument::new(&r, &cfg, RunManifest::default());
        assert!(check_fixpoint(&doc, sys.lipschitz).unwrap().passed);
    }
}
