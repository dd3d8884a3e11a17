use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{GaussianBump, ScalarField2D};
use crate::metric::{Bounds, ManifoldModel, PlanarPoint};
use crate::planner::ObstacleRegion;

pub const SCHEMA_VERSION: u32 = 1;

pub const PRESETS: [&str; 6] = ["flat", "peak1-3d", "peak3-3d", "peak6-4d", "repeat-3d", "repeat-4d"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerDefaults {
    pub n_samples: usize,
    pub eta: f64,
    pub gamma_near: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicDefaults {
    pub fan_count: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub step: f64,
    pub max_length: f64,
    /// Bisect on the heading between adjacent fan rays that bracket the goal.
    pub refine: bool,
}

/// A planning scenario: workspace, endpoints, embedding fields, obstacles and
/// the default knobs of every protocol.
///
/// `fields[0]` is `x3`, `fields[1]` is `x4`, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub name: String,
    pub bounds: Bounds,
    pub start: PlanarPoint,
    pub goal: PlanarPoint,
    /// Goal disk radius, shared by planner goal extraction and geodesic hits.
    pub goal_radius: f64,
    pub planner: PlannerDefaults,
    pub geodesic: GeodesicDefaults,
    #[serde(default)]
    pub fields: Vec<ScalarField2D>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleRegion>,
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::invalid(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                self.schema
            )));
        }
        if self.name.trim().is_empty() {
            return Err(Error::invalid("scenario name is empty"));
        }
        Bounds::new(self.bounds.min, self.bounds.max)?;
        for (label, p) in [("start", self.start), ("goal", self.goal)] {
            if !self.bounds.contains(p) {
                return Err(Error::invalid(format!("{label} {p:?} lies outside the workspace bounds")));
            }
            if self.obstacles.iter().any(|o| o.contains(p)) {
                return Err(Error::invalid(format!("{label} {p:?} lies inside an obstacle")));
            }
        }
        positive("goal_radius", self.goal_radius)?;

        let p = &self.planner;
        if p.n_samples == 0 {
            return Err(Error::invalid("planner.n_samples must be >= 1"));
        }
        positive("planner.eta", p.eta)?;
        positive("planner.gamma_near", p.gamma_near)?;

        let g = &self.geodesic;
        if g.fan_count < 2 {
            return Err(Error::invalid(format!("geodesic.fan_count must be >= 2, got {}", g.fan_count)));
        }
        if !(g.theta_min < g.theta_max) || !g.theta_min.is_finite() || !g.theta_max.is_finite() {
            return Err(Error::invalid(format!(
                "geodesic fan range must satisfy theta_min < theta_max, got [{}, {}]",
                g.theta_min, g.theta_max
            )));
        }
        positive("geodesic.step", g.step)?;
        positive("geodesic.max_length", g.max_length)?;

        for field in &self.fields {
            field.bumps.iter().try_for_each(GaussianBump::validate)?;
        }
        self.obstacles.iter().try_for_each(ObstacleRegion::validate)
    }

    pub fn model(&self) -> ManifoldModel {
        ManifoldModel::from_bump_fields(self.fields.iter().cloned())
    }

    pub fn ambient_dim(&self) -> usize {
        2 + self.fields.len()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    /// Parse and validate. `origin` names the source in diagnostics.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config {
            origin: origin.to_owned(),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|e| Error::Config {
            origin: origin.to_owned(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let bump = |a: f64, c1: f64, c2: f64, decay: f64| GaussianBump {
            amplitude: a,
            center: [c1, c2],
            decay: [decay, decay],
        };
        let field = |bumps: Vec<GaussianBump>| ScalarField2D { bumps };
        let (fields, fan_count) = match name {
            "flat" => (vec![], 200),
            "peak1-3d" => (vec![field(vec![bump(5.0, 5.0, 5.0, 0.1)])], 200),
            "peak3-3d" => (
                vec![field(vec![
                    bump(7.0, 3.0, 3.0, 0.5),
                    bump(6.0, 7.0, 3.0, 0.5),
                    bump(5.0, 5.0, 7.0, 0.5),
                ])],
                400,
            ),
            "peak6-4d" => (
                vec![
                    field(vec![
                        bump(5.0, 3.0, 3.0, 0.5),
                        bump(5.0, 7.0, 3.0, 0.5),
                        bump(5.0, 3.0, 7.0, 0.5),
                        bump(5.0, 7.0, 7.0, 0.5),
                    ]),
                    field(vec![bump(3.0, 5.0, 8.0, 0.5), bump(3.0, 5.0, 2.0, 0.5)]),
                ],
                600,
            ),
            "repeat-3d" | "repeat-4d" => {
                let mut fields = vec![field(vec![
                    bump(5.0, 5.0, 8.0, 0.5),
                    bump(5.0, 8.0, 5.0, 0.5),
                    bump(5.0, 2.0, 2.0, 0.5),
                    bump(5.0, 8.0, 2.0, 0.5),
                ])];
                if name == "repeat-4d" {
                    fields.push(field(vec![
                        bump(3.0, 2.0, 8.0, 0.5),
                        bump(3.0, 8.0, 8.0, 0.5),
                        bump(7.0, 5.0, 5.0, 0.5),
                    ]));
                }
                (fields, 400)
            }
            _ => return Err(Error::UnknownPreset(name.to_owned())),
        };
        Ok(ScenarioConfig {
            schema: SCHEMA_VERSION,
            name: name.to_owned(),
            bounds: Bounds::square(-1.0, 11.0)?,
            start: PlanarPoint::new(0.0, 0.0),
            goal: PlanarPoint::new(10.0, 10.0),
            goal_radius: 0.5,
            planner: PlannerDefaults {
                n_samples: 10_000,
                eta: 0.5,
                gamma_near: 15.0,
            },
            geodesic: GeodesicDefaults {
                fan_count,
                theta_min: 0.0,
                theta_max: FRAC_PI_2,
                step: 1e-3,
                max_length: 40.0,
                refine: true,
            },
            fields,
            obstacles: vec![],
        })
    }
}

/// Resolve a preset name or a path to a TOML scenario file.
pub fn load_scenario(spec: &str) -> Result<ScenarioConfig> {
    if PRESETS.contains(&spec) {
        return ScenarioConfig::preset(spec);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::UnknownPreset(spec.to_owned()));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ScenarioConfig::from_toml(&text, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates_and_round_trips() {
        for name in PRESETS {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            let back = ScenarioConfig::from_toml(&cfg.to_toml(), name).unwrap();
            assert_eq!(back, cfg, "{name}");
        }
    }

    #[test]
    fn peak1_is_one_wide_bump() {
        let cfg = ScenarioConfig::preset("peak1-3d").unwrap();
        assert_eq!(cfg.ambient_dim(), 3);
        let b = cfg.fields[0].bumps[0];
        assert_eq!((b.amplitude, b.center, b.decay), (5.0, [5.0, 5.0], [0.1, 0.1]));
    }

    #[test]
    fn peak6_has_height_and_resistance() {
        let cfg = ScenarioConfig::preset("peak6-4d").unwrap();
        assert_eq!(cfg.ambient_dim(), 4);
        let centers: Vec<[f64; 2]> = cfg.fields[0].bumps.iter().map(|b| b.center).collect();
        assert_eq!(centers, [[3.0, 3.0], [7.0, 3.0], [3.0, 7.0], [7.0, 7.0]]);
        assert!(cfg.fields[0].bumps.iter().all(|b| b.amplitude == 5.0 && b.decay == [0.5, 0.5]));
        let res: Vec<_> = cfg.fields[1].bumps.iter().map(|b| (b.amplitude, b.center)).collect();
        assert_eq!(res, [(3.0, [5.0, 8.0]), (3.0, [5.0, 2.0])]);
        assert_eq!(cfg.geodesic.fan_count, 600);
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(load_scenario("no-such-thing"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn malformed_toml_reports_location() {
        let text = ScenarioConfig::preset("flat").unwrap().to_toml().replace("goal_radius = 0.5", "goal_radius = ");
        match ScenarioConfig::from_toml(&text, "bad.toml") {
            Err(Error::Config { origin, message }) => {
                assert_eq!(origin, "bad.toml");
                assert!(message.contains("line"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("bogus = 1\n{}", ScenarioConfig::preset("flat").unwrap().to_toml());
        let err = ScenarioConfig::from_toml(&text, "x").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn goal_outside_bounds_is_rejected() {
        let mut cfg = ScenarioConfig::preset("flat").unwrap();
        cfg.goal = PlanarPoint::new(12.0, 10.0);
        assert!(cfg.validate().is_err());
        let err = ScenarioConfig::from_toml(&cfg.to_toml(), "x").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn start_inside_obstacle_is_rejected() {
        let mut cfg = ScenarioConfig::preset("flat").unwrap();
        cfg.obstacles.push(ObstacleRegion::Circle {
            center: PlanarPoint::new(0.2, 0.0),
            radius: 0.5,
        });
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = ScenarioConfig::preset("flat").unwrap().to_toml().replace("schema = 1", "schema = 2");
        assert!(ScenarioConfig::from_toml(&text, "x").is_err());
    }

    #[test]
    fn obstacles_round_trip() {
        let mut cfg = ScenarioConfig::preset("peak1-3d").unwrap();
        cfg.obstacles = vec![
            ObstacleRegion::Circle { center: PlanarPoint::new(5.0, 5.0), radius: 1.0 },
            ObstacleRegion::Rectangle { min: PlanarPoint::new(2.0, 6.0), max: PlanarPoint::new(3.0, 9.0) },
        ];
        let back = ScenarioConfig::from_toml(&cfg.to_toml(), "x").unwrap();
        assert_eq!(back, cfg);
    }
}
