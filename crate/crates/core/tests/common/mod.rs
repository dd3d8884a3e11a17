#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use riemplan::harness::{ScenarioConfig, PRESETS};
use riemplan::{GaussianBump, ManifoldModel, PlanarPoint, ScalarField2D};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point(rng: &mut impl Rng, lo: f64, hi: f64) -> PlanarPoint {
    PlanarPoint::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

/// 1..=3 extra dimensions, each a sum of 1..=3 anisotropic bumps over the
/// usual workspace.
pub fn random_model(rng: &mut impl Rng) -> ManifoldModel {
    let dims = rng.gen_range(1..=3);
    ManifoldModel::from_bump_fields((0..dims).map(|_| {
        let bumps = (0..rng.gen_range(1..=3))
            .map(|_| {
                GaussianBump::new(
                    rng.gen_range(-6.0..6.0),
                    [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)],
                    [rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)],
                )
                .unwrap()
            })
            .collect();
        ScalarField2D::new(bumps).unwrap()
    }))
}

pub fn preset_models() -> Vec<(&'static str, ManifoldModel)> {
    PRESETS
        .iter()
        .map(|&name| (name, ScenarioConfig::preset(name).unwrap().model()))
        .collect()
}

/// `e^{-(x1^2 + x2^2)}`
pub fn bell() -> ManifoldModel {
    ManifoldModel::from_bump_fields([ScalarField2D::new(vec![GaussianBump::isotropic(1.0, [0.0, 0.0], 1.0).unwrap()]).unwrap()])
}
