//! Shared scene builders for the benchmark targets.

use nabla_core::scenegen::{self, ScenePlan};
use nabla_core::{GenPowerSeries, Jet, JetMatrix, LinearSystem, SampleGrid, Scalar, Scene};

/// Seeded jet scene with an attached (1,1) field, deep enough for `k`
/// derivative levels.
pub fn jet_scene(seed: u64, dim: usize, k: usize) -> Scene {
    let mut rng = scenegen::rng_for(seed, 0);
    let plan = ScenePlan {
        dim_max: dim,
        k_max: k,
        valence: Some((1, 1)),
        with_transition: false,
        series_exact: false,
    };
    scenegen::random_scene(&mut rng, &plan)
}

/// Seeded series-exact scene (base 0, order sized for the degree growth).
pub fn exact_scene(seed: u64, dim: usize, k: usize) -> Scene {
    let mut rng = scenegen::rng_for(seed, 0);
    let plan = ScenePlan {
        dim_max: dim,
        k_max: k,
        valence: Some((1, 1)),
        with_transition: false,
        series_exact: true,
    };
    scenegen::random_scene(&mut rng, &plan)
}

/// The f = 1, g = 1 scalar system in the float backend.
pub fn unit_system(n_trunc: usize) -> LinearSystem {
    let order = n_trunc + 3;
    let base = Scalar::Float(0.0);
    let f = JetMatrix::from_entries(
        1,
        vec![Jet::constant(Scalar::Float(1.0), order, base).expect("float jet")],
    )
    .expect("one entry");
    let g = vec![GenPowerSeries::constant(Scalar::Float(1.0))];
    let grid = SampleGrid { start: 0.0, stop: 1.0, step: 0.1 };
    LinearSystem::new(1, f, g, grid).expect("well-formed system")
}
