//! Edge costs.

use serde::{Deserialize, Serialize};

use crate::metric::{ManifoldModel, PlanarPoint};

/// Closed Newton-Cotes weights on five equally spaced nodes; they sum to 1.
pub const LINE_R_WEIGHTS: [f64; 5] = [7.0 / 90.0, 16.0 / 45.0, 2.0 / 15.0, 16.0 / 45.0, 7.0 / 90.0];

/// `h`-length of the straight planar segment `v1 -> v2`, by the 5-point
/// closed Newton-Cotes rule applied to `||v2 - v1||_h` sampled at
/// `v1 + k/4 (v2 - v1)`.
pub fn line_r_cost(model: &ManifoldModel, v1: PlanarPoint, v2: PlanarPoint) -> f64 {
    let delta = v1.delta_to(v2);
    if delta == [0.0, 0.0] {
        return 0.0;
    }
    let r: [f64; 5] = std::array::from_fn(|k| model.tangent_norm(v1.lerp(v2, k as f64 / 4.0), delta));
    // Weighted sum written around the middle sample: since the weights sum
    // to 1 this is the same rule, and it is exact when all samples agree.
    let mid = r[2];
    mid + LINE_R_WEIGHTS
        .iter()
        .zip(r)
        .map(|(w, rk)| w * (rk - mid))
        .sum::<f64>()
}

/// Chord length in `R^n` between the lifted endpoints.
pub fn euclidean_lifted_cost(model: &ManifoldModel, v1: PlanarPoint, v2: PlanarPoint) -> f64 {
    model.lift(v1).distance(&model.lift(v2))
}

/// Which edge cost drives parent selection and rewiring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostBackend {
    Riemannian,
    EuclideanLifted,
}

impl CostBackend {
    #[inline]
    pub fn edge_cost(&self, model: &ManifoldModel, v1: PlanarPoint, v2: PlanarPoint) -> f64 {
        match self {
            CostBackend::Riemannian => line_r_cost(model, v1, v2),
            CostBackend::EuclideanLifted => euclidean_lifted_cost(model, v1, v2),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CostBackend::Riemannian => "riemannian",
            CostBackend::EuclideanLifted => "euclidean-lifted",
        }
    }
}
