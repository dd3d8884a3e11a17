use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{self, FanSpec, GeodesicOptions, GeodesicTrace};
use crate::metric::ManifoldModel;
use crate::planner::{self, CostBackend, PlanOutcome, PlannerConfig};

use super::export::{GeodesicsExport, PathExport, TraceExport};
use super::scenario::ScenarioConfig;

/// Bisection steps per bracketing pair of fan rays.
pub const REFINE_ITERATIONS: usize = 40;
/// Keep every n-th integration step of oracle traces.
pub const ORACLE_RECORD_EVERY: usize = 50;
/// Cap on exported points per geodesic.
pub const EXPORT_MAX_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[serde(rename = "rrtstar-r")]
    RrtStarR,
    #[serde(rename = "rrtstar-euclid")]
    RrtStarEuclid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::RrtStarR, Algorithm::RrtStarEuclid];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::RrtStarR => "rrtstar-r",
            Algorithm::RrtStarEuclid => "rrtstar-euclid",
        }
    }

    pub fn backend(&self) -> CostBackend {
        match self {
            Algorithm::RrtStarR => CostBackend::Riemannian,
            Algorithm::RrtStarEuclid => CostBackend::EuclideanLifted,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm `{s}` (expected rrtstar-r or rrtstar-euclid)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Ok,
    GoalNotReached,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::GoalNotReached => "goal-not-reached",
        }
    }
}

/// One planner run. Lengths are `None` when the goal was not reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub n_samples: usize,
    pub h_length: Option<f64>,
    pub lifted_length: Option<f64>,
    pub backend_cost: Option<f64>,
    pub nodes: usize,
    /// Wall-clock milliseconds around `plan`; 0 unless timing is enabled.
    pub wall_ms: u64,
    pub status: RunStatus,
}

/// Box-plot statistics of the path h-lengths of the successful trials.
/// All values are NaN when no trial succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub trials: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one trial.
    pub std: f64,
    pub failures: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl SummaryStats {
    pub fn from_values(values: &[f64], failures: usize) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                trials: 0,
                min: f64::NAN,
                q1: f64::NAN,
                median: f64::NAN,
                q3: f64::NAN,
                max: f64::NAN,
                mean: f64::NAN,
                std: f64::NAN,
                failures,
            };
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self {
            trials: n,
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            q3: quantile(&sorted, 0.75),
            max: sorted[n - 1],
            mean,
            std,
            failures,
        }
    }

    pub fn from_records(records: &[RunRecord]) -> Self {
        let values: Vec<f64> = records.iter().filter_map(|r| r.h_length).collect();
        Self::from_values(&values, records.len() - values.len())
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatResult {
    pub records: Vec<RunRecord>,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n_samples: usize,
    pub stats: SummaryStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub seed: u64,
    pub n_samples: usize,
    pub riemannian: Option<f64>,
    pub euclidean: Option<f64>,
    pub geodesic: Option<f64>,
}

/// Fan traces followed by the refined traces, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub traces: Vec<GeodesicTrace>,
    pub fan_count: usize,
    pub best: usize,
    pub length: f64,
}

impl OracleResult {
    pub fn best_trace(&self) -> &GeodesicTrace {
        &self.traces[self.best]
    }

    pub fn hits(&self) -> usize {
        self.traces.iter().filter(|t| t.is_hit()).count()
    }

    /// The fan alone, without refined traces.
    pub fn fan(&self) -> &[GeodesicTrace] {
        &self.traces[..self.fan_count]
    }

    pub fn export(&self, scenario: &str) -> GeodesicsExport {
        GeodesicsExport {
            scenario: scenario.to_owned(),
            fan_count: self.fan_count,
            hits: self.hits(),
            best_angle: self.best_trace().angle,
            best_length: self.length,
            traces: self
                .traces
                .iter()
                .enumerate()
                .map(|(i, t)| TraceExport::new(t, i >= self.fan_count, EXPORT_MAX_POINTS))
                .collect(),
        }
    }
}

/// A validated scenario with its model, running the experiment protocols.
#[derive(Debug, Clone)]
pub struct Experiment {
    scenario: ScenarioConfig,
    model: ManifoldModel,
    timing: bool,
}

impl Experiment {
    pub fn new(scenario: ScenarioConfig) -> Result<Self> {
        scenario.validate()?;
        let model = scenario.model();
        Ok(Self {
            scenario,
            model,
            timing: false,
        })
    }

    /// Record wall-clock time in `RunRecord::wall_ms`. Off by default so that
    /// outputs are reproducible byte for byte.
    pub fn with_timing(mut self, timing: bool) -> Self {
        self.timing = timing;
        self
    }

    pub fn scenario(&self) -> &ScenarioConfig {
        &self.scenario
    }

    pub fn model(&self) -> &ManifoldModel {
        &self.model
    }

    pub fn planner_config(&self, algorithm: Algorithm, seed: u64, n_samples: usize) -> PlannerConfig {
        let s = &self.scenario;
        PlannerConfig {
            bounds: s.bounds,
            start: s.start,
            goal: s.goal,
            goal_radius: s.goal_radius,
            n_samples,
            eta: s.planner.eta,
            gamma_near: s.planner.gamma_near,
            seed,
            obstacles: s.obstacles.clone(),
            backend: algorithm.backend(),
        }
    }

    pub fn geodesic_options(&self) -> GeodesicOptions {
        let s = &self.scenario;
        GeodesicOptions {
            step: s.geodesic.step,
            max_length: s.geodesic.max_length,
            bounds: s.bounds,
            goal: s.goal,
            hit_radius: s.goal_radius,
            record_every: ORACLE_RECORD_EVERY,
        }
    }

    pub fn fan(&self) -> FanSpec {
        let g = &self.scenario.geodesic;
        FanSpec {
            theta_min: g.theta_min,
            theta_max: g.theta_max,
            count: g.fan_count,
        }
    }

    fn record(&self, algorithm: Algorithm, seed: u64, n_samples: usize) -> RunRecord {
        RunRecord {
            scenario: self.scenario.name.clone(),
            algorithm,
            seed,
            n_samples,
            h_length: None,
            lifted_length: None,
            backend_cost: None,
            nodes: 0,
            wall_ms: 0,
            status: RunStatus::GoalNotReached,
        }
    }

    fn timed_plan(&self, cfg: &PlannerConfig) -> (Result<PlanOutcome>, u64) {
        let t0 = Instant::now();
        let out = planner::plan(&self.model, cfg);
        let ms = if self.timing { t0.elapsed().as_millis() as u64 } else { 0 };
        (out, ms)
    }

    /// One run at the scenario's default sample count. Goal-not-reached is
    /// an error here.
    pub fn run_single(&self, algorithm: Algorithm, seed: u64) -> Result<(RunRecord, PlanOutcome)> {
        let n = self.scenario.planner.n_samples;
        let (out, wall_ms) = self.timed_plan(&self.planner_config(algorithm, seed, n));
        let out = out?;
        let rec = RunRecord {
            h_length: Some(out.h_length),
            lifted_length: Some(out.lifted_length),
            backend_cost: Some(out.cost),
            nodes: out.tree.len(),
            wall_ms,
            status: RunStatus::Ok,
            ..self.record(algorithm, seed, n)
        };
        Ok((rec, out))
    }

    /// One batch trial. Goal-not-reached becomes a failure record.
    pub fn run_trial(&self, algorithm: Algorithm, seed: u64, n_samples: usize) -> Result<RunRecord> {
        let (out, wall_ms) = self.timed_plan(&self.planner_config(algorithm, seed, n_samples));
        let base = self.record(algorithm, seed, n_samples);
        match out {
            Ok(out) => Ok(RunRecord {
                h_length: Some(out.h_length),
                lifted_length: Some(out.lifted_length),
                backend_cost: Some(out.cost),
                nodes: out.tree.len(),
                wall_ms,
                status: RunStatus::Ok,
                ..base
            }),
            Err(Error::GoalNotReached { nodes, .. }) => Ok(RunRecord { nodes, wall_ms, ..base }),
            Err(e) => Err(e),
        }
    }

    pub fn path_export(&self, record: &RunRecord, outcome: &PlanOutcome) -> PathExport {
        PathExport {
            scenario: record.scenario.clone(),
            algorithm: record.algorithm.as_str().to_owned(),
            seed: record.seed,
            n_samples: record.n_samples,
            h_length: outcome.h_length,
            backend_cost: outcome.cost,
            planar: outcome.path.clone(),
            lifted: outcome.path.iter().map(|&p| self.model.lift(p)).collect(),
            cumulative_cost: outcome.cumulative_cost.clone(),
        }
    }

    /// Shoot the scenario's fan (plus bisection refinement when enabled) and
    /// pick the shortest goal-hitting geodesic, preferring refined traces.
    pub fn run_geodesic_oracle(&self) -> Result<OracleResult> {
        if !self.scenario.obstacles.is_empty() {
            return Err(Error::invalid(
                "the geodesic oracle needs an obstacle-free scenario",
            ));
        }
        let opts = self.geodesic_options();
        let fan = self.fan();
        let start = self.scenario.start;
        let mut traces = geodesic::shoot_fan(&self.model, start, &fan, &opts)?;
        if self.scenario.geodesic.refine {
            traces.extend(geodesic::refine_fan(&self.model, start, &fan, REFINE_ITERATIONS, &opts)?);
        }
        // Refined traces pass through the goal itself; raw fan hits may stop
        // up to a hit radius short of it, so they only count without them.
        let first = if traces[fan.count..].iter().any(GeodesicTrace::is_hit) { fan.count } else { 0 };
        let (best, length) = traces
            .iter()
            .enumerate()
            .skip(first)
            .filter(|(_, t)| t.is_hit())
            .map(|(i, t)| (i, t.arc_length()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::NoGeodesicHit { traces: fan.count })?;
        Ok(OracleResult {
            traces,
            fan_count: fan.count,
            best,
            length,
        })
    }

    /// `trials` runs with seeds `base_seed ..`, merged in seed order.
    pub fn run_repeat(&self, algorithm: Algorithm, trials: usize, base_seed: u64) -> Result<RepeatResult> {
        if trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        let records = self.batch(algorithm, self.scenario.planner.n_samples, trials, base_seed)?;
        let stats = SummaryStats::from_records(&records);
        Ok(RepeatResult { records, stats })
    }

    fn batch(&self, algorithm: Algorithm, n_samples: usize, trials: usize, base_seed: u64) -> Result<Vec<RunRecord>> {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| self.run_trial(algorithm, base_seed.wrapping_add(i), n_samples))
            .collect()
    }

    /// Per-N statistics over `trials` runs each. Every N reuses the same seeds.
    pub fn run_convergence(
        &self,
        algorithm: Algorithm,
        n_list: &[usize],
        trials: usize,
        base_seed: u64,
    ) -> Result<(Vec<ConvergenceRow>, Vec<RunRecord>)> {
        if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
            return Err(Error::invalid(format!(
                "sample counts must be nonempty, positive and strictly ascending, got {n_list:?}"
            )));
        }
        if trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        let mut rows = Vec::with_capacity(n_list.len());
        let mut records = Vec::new();
        for &n in n_list {
            let batch = self.batch(algorithm, n, trials, base_seed)?;
            rows.push(ConvergenceRow {
                n_samples: n,
                stats: SummaryStats::from_records(&batch),
            });
            records.extend(batch);
        }
        Ok((rows, records))
    }

    /// Both planners on each seed, plus the oracle length when one exists.
    pub fn run_compare(&self, n_samples: usize, seeds: &[u64]) -> Result<(Vec<CompareRow>, Vec<RunRecord>)> {
        let geodesic = if self.scenario.obstacles.is_empty() {
            match self.run_geodesic_oracle() {
                Ok(o) => Some(o.length),
                Err(Error::NoGeodesicHit { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let pairs: Vec<(RunRecord, RunRecord)> = seeds
            .par_iter()
            .map(|&seed| {
                Ok((
                    self.run_trial(Algorithm::RrtStarR, seed, n_samples)?,
                    self.run_trial(Algorithm::RrtStarEuclid, seed, n_samples)?,
                ))
            })
            .collect::<Result<_>>()?;
        let rows = pairs
            .iter()
            .map(|(r, e)| CompareRow {
                seed: r.seed,
                n_samples,
                riemannian: r.h_length,
                euclidean: e.h_length,
                geodesic,
            })
            .collect();
        let records = pairs.into_iter().flat_map(|(r, e)| [r, e]).collect();
        Ok((rows, records))
    }
}

/// `2000, 4000, ..., 20000`
pub fn default_convergence_samples() -> Vec<usize> {
    (1..=10).map(|k| 2000 * k).collect()
}
