//! RRT*-R: RRT* on the projection plane with the `h`-length of straight
//! planar edges as the edge cost.
//!
//! Nearest and near-neighbour queries use planar Euclidean distance; the
//! configured [`CostBackend`] drives best-parent selection, rewiring and the
//! reported path cost. [`CostBackend::EuclideanLifted`] turns the same
//! machinery into the ordinary RRT* baseline that measures chords between
//! lifted points in `R^n`.

mod cost;
mod grid;
mod obstacle;
mod tree;

pub use cost::{euclidean_lifted_cost, line_r_cost, CostBackend, LINE_R_WEIGHTS};
pub use grid::GridIndex;
pub use obstacle::{obstacle_free, ObstacleRegion};
pub use tree::PlanTree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Bounds, ManifoldModel, PlanarPoint};

/// Gauss-Legendre panels per path segment when measuring a returned path.
pub const PATH_LENGTH_PANELS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub bounds: Bounds,
    pub start: PlanarPoint,
    pub goal: PlanarPoint,
    pub goal_radius: f64,
    pub n_samples: usize,
    /// Steer step.
    pub eta: f64,
    pub gamma_near: f64,
    pub seed: u64,
    pub obstacles: Vec<ObstacleRegion>,
    pub backend: CostBackend,
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        for o in &self.obstacles {
            o.validate()?;
        }
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if !p.is_finite() || !self.bounds.contains(p) {
                return Err(Error::invalid(format!("{name} {p:?} lies outside the workspace")));
            }
            if self.obstacles.iter().any(|o| o.contains(p)) {
                return Err(Error::invalid(format!("{name} {p:?} lies inside an obstacle")));
            }
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be >= 1"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.gamma_near > 0.0 && self.gamma_near.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma_near must be positive, got {}",
                self.gamma_near
            )));
        }
        if !(self.goal_radius > 0.0 && self.goal_radius.is_finite()) {
            return Err(Error::invalid(format!(
                "goal radius must be positive, got {}",
                self.goal_radius
            )));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Uniform sample over the workspace rectangle.
pub fn sample<R: Rng + ?Sized>(rng: &mut R, bounds: &Bounds) -> PlanarPoint {
    PlanarPoint::new(
        rng.gen_range(bounds.min.x1..bounds.max.x1),
        rng.gen_range(bounds.min.x2..bounds.max.x2),
    )
}

/// Vertex closest to `p` in the plane; ties go to the lowest index.
pub fn nearest(tree: &PlanTree, p: PlanarPoint) -> usize {
    tree.nearest(p)
}

/// Move from `from` toward `to` by at most `eta`.
pub fn steer(from: PlanarPoint, to: PlanarPoint, eta: f64) -> PlanarPoint {
    let dist = from.distance(to);
    if dist <= eta {
        to
    } else {
        from.lerp(to, eta / dist)
    }
}

/// `min(gamma * sqrt(ln(card) / card), eta)`
pub fn near_radius(cardinality: usize, gamma_near: f64, eta: f64) -> f64 {
    let n = cardinality.max(1) as f64;
    (gamma_near * (n.ln() / n).sqrt()).min(eta)
}

/// Vertices within the shrinking RRT* radius of `p`, ascending.
pub fn near(tree: &PlanTree, p: PlanarPoint, cardinality: usize, gamma_near: f64, eta: f64) -> Vec<usize> {
    tree.within(p, near_radius(cardinality, gamma_near, eta))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendOutcome {
    Added { vertex: usize, rewired: Vec<usize> },
    /// The steered edge hits an obstacle.
    Blocked,
    /// The steered point coincides with its nearest vertex.
    Degenerate,
}

/// One RRT*-R extension toward `target`.
pub fn extend(tree: &mut PlanTree, target: PlanarPoint, cfg: &PlannerConfig, model: &ManifoldModel) -> ExtendOutcome {
    let v_nearest = tree.nearest(target);
    let p_nearest = tree.vertex(v_nearest);
    let p_new = steer(p_nearest, target, cfg.eta);
    if p_new == p_nearest {
        return ExtendOutcome::Degenerate;
    }
    if !obstacle_free(p_nearest, p_new, &cfg.obstacles) {
        return ExtendOutcome::Blocked;
    }

    let backend = cfg.backend;
    let mut v_min = v_nearest;
    let mut c_min = tree.cost(v_nearest) + backend.edge_cost(model, p_nearest, p_new);

    // (vertex, edge cost to p_new) for every obstacle-free near vertex.
    let candidates: Vec<(usize, f64)> = near(tree, p_new, tree.len(), cfg.gamma_near, cfg.eta)
        .into_iter()
        .filter(|&v| v != v_nearest)
        .filter(|&v| obstacle_free(tree.vertex(v), p_new, &cfg.obstacles))
        .map(|v| (v, backend.edge_cost(model, tree.vertex(v), p_new)))
        .collect();

    for &(v, edge) in &candidates {
        let c = tree.cost(v) + edge;
        if c < c_min {
            c_min = c;
            v_min = v;
        }
    }

    let v_new = tree.add(p_new, v_min, c_min);

    let mut rewired = Vec::new();
    for &(v, edge) in &candidates {
        if v == v_min {
            continue;
        }
        let through_new = c_min + edge;
        if tree.cost(v) > through_new && !tree.is_ancestor(v, v_new) {
            tree.reparent(v, v_new, through_new);
            rewired.push(v);
        }
    }
    ExtendOutcome::Added { vertex: v_new, rewired }
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub tree: PlanTree,
    /// Start to goal (goal appended when reachable from the final vertex).
    pub path: Vec<PlanarPoint>,
    /// Cost-to-root along `path` under each vertex's stored cost.
    pub cumulative_cost: Vec<f64>,
    /// Path cost under the planner's own backend.
    pub cost: f64,
    /// Path length under `h`, the common yardstick for both backends.
    pub h_length: f64,
    /// Euclidean length of the lifted polyline in `R^n`.
    pub lifted_length: f64,
    pub goal_vertex: usize,
    /// `(iteration, best cost)` each time the best goal cost improved.
    pub best_cost_history: Vec<(usize, f64)>,
}

struct GoalCandidate {
    vertex: usize,
    /// Edge cost to the goal point, if that edge is free.
    leg: Option<f64>,
}

impl GoalCandidate {
    fn total(&self, tree: &PlanTree) -> f64 {
        tree.cost(self.vertex) + self.leg.unwrap_or(0.0)
    }
}

fn best_goal(candidates: &[GoalCandidate], tree: &PlanTree) -> Option<(usize, f64)> {
    candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.total(tree)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

/// Run `n_samples` iterations of sample + extend and extract the cheapest
/// path reaching the goal disk.
pub fn plan(model: &ManifoldModel, cfg: &PlannerConfig) -> Result<PlanOutcome> {
    cfg.validate()?;
    let mut rng = cfg.rng();
    let mut tree = PlanTree::new(cfg.start, cfg.bounds, cfg.eta);
    let mut goal_set: Vec<GoalCandidate> = Vec::new();
    let mut history = Vec::new();
    let mut best = f64::INFINITY;

    let consider = |v: usize, tree: &PlanTree, goal_set: &mut Vec<GoalCandidate>| {
        let p = tree.vertex(v);
        if p.distance(cfg.goal) <= cfg.goal_radius {
            let leg = obstacle_free(p, cfg.goal, &cfg.obstacles)
                .then(|| cfg.backend.edge_cost(model, p, cfg.goal));
            goal_set.push(GoalCandidate { vertex: v, leg });
        }
    };
    consider(0, &tree, &mut goal_set);

    for i in 0..cfg.n_samples {
        let target = sample(&mut rng, &cfg.bounds);
        if let ExtendOutcome::Added { vertex, rewired } = extend(&mut tree, target, cfg, model) {
            consider(vertex, &tree, &mut goal_set);
            if !rewired.is_empty() || goal_set.last().is_some_and(|c| c.vertex == vertex) {
                if let Some((_, cost)) = best_goal(&goal_set, &tree) {
                    if cost < best {
                        best = cost;
                        history.push((i + 1, cost));
                    }
                }
            }
        }
    }

    let Some((idx, cost)) = best_goal(&goal_set, &tree) else {
        return Err(Error::GoalNotReached {
            samples: cfg.n_samples,
            nodes: tree.len(),
        });
    };
    let candidate = &goal_set[idx];
    let chain = tree.path_from_root(candidate.vertex);
    let mut path: Vec<PlanarPoint> = chain.iter().map(|&v| tree.vertex(v)).collect();
    let mut cumulative_cost: Vec<f64> = chain.iter().map(|&v| tree.cost(v)).collect();
    if candidate.leg.is_some() && *path.last().expect("non-empty chain") != cfg.goal {
        path.push(cfg.goal);
        cumulative_cost.push(cost);
    }
    let h_length = if path.len() >= 2 {
        model.curve_length(&path, PATH_LENGTH_PANELS)?
    } else {
        0.0
    };
    let lifted_length = lifted_polyline_length(model, &path);
    let goal_vertex = candidate.vertex;
    Ok(PlanOutcome {
        tree,
        path,
        cumulative_cost,
        cost,
        h_length,
        lifted_length,
        goal_vertex,
        best_cost_history: history,
    })
}

/// Sum of chord lengths between consecutive lifted vertices.
pub fn lifted_polyline_length(model: &ManifoldModel, path: &[PlanarPoint]) -> f64 {
    let lifted: Vec<_> = path.iter().map(|&p| model.lift(p)).collect();
    lifted.windows(2).map(|w| w[0].distance(&w[1])).sum()
}
