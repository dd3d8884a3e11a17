use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::PlanarPoint;

/// Forbidden region of the projection plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum ObstacleRegion {
    Circle { center: PlanarPoint, radius: f64 },
    Rectangle { min: PlanarPoint, max: PlanarPoint },
}

impl ObstacleRegion {
    pub fn validate(&self) -> Result<()> {
        match self {
            ObstacleRegion::Circle { center, radius } => {
                if !center.is_finite() || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!(
                        "circle obstacle needs finite center and radius > 0, got {center:?}, {radius}"
                    )));
                }
            }
            ObstacleRegion::Rectangle { min, max } => {
                if !(min.is_finite() && max.is_finite()) || min.x1 >= max.x1 || min.x2 >= max.x2 {
                    return Err(Error::invalid(format!(
                        "rectangle obstacle needs min < max componentwise, got {min:?} .. {max:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: PlanarPoint) -> bool {
        match *self {
            ObstacleRegion::Circle { center, radius } => center.distance_sq(p) <= radius * radius,
            ObstacleRegion::Rectangle { min, max } => {
                p.x1 >= min.x1 && p.x1 <= max.x1 && p.x2 >= min.x2 && p.x2 <= max.x2
            }
        }
    }

    /// Whether the closed segment `a b` touches the closed region.
    pub fn intersects_segment(&self, a: PlanarPoint, b: PlanarPoint) -> bool {
        match *self {
            ObstacleRegion::Circle { center, radius } => {
                segment_point_distance_sq(a, b, center) <= radius * radius
            }
            ObstacleRegion::Rectangle { min, max } => segment_hits_box(a, b, min, max),
        }
    }
}

fn segment_point_distance_sq(a: PlanarPoint, b: PlanarPoint, c: PlanarPoint) -> f64 {
    let [d1, d2] = a.delta_to(b);
    let len_sq = d1 * d1 + d2 * d2;
    if len_sq == 0.0 {
        return a.distance_sq(c);
    }
    let [e1, e2] = a.delta_to(c);
    let t = ((e1 * d1 + e2 * d2) / len_sq).clamp(0.0, 1.0);
    a.lerp(b, t).distance_sq(c)
}

/// Liang-Barsky clipping of the segment against the closed box.
fn segment_hits_box(a: PlanarPoint, b: PlanarPoint, min: PlanarPoint, max: PlanarPoint) -> bool {
    let [d1, d2] = a.delta_to(b);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let checks = [
        (-d1, a.x1 - min.x1),
        (d1, max.x1 - a.x1),
        (-d2, a.x2 - min.x2),
        (d2, max.x2 - a.x2),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// True iff the closed segment avoids every obstacle.
pub fn obstacle_free(a: PlanarPoint, b: PlanarPoint, obstacles: &[ObstacleRegion]) -> bool {
    obstacles.iter().all(|o| !o.intersects_segment(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x1: f64, x2: f64) -> PlanarPoint {
        PlanarPoint::new(x1, x2)
    }

    fn circle() -> ObstacleRegion {
        ObstacleRegion::Circle { center: pt(5.0, 5.0), radius: 1.0 }
    }

    fn rect() -> ObstacleRegion {
        ObstacleRegion::Rectangle { min: pt(2.0, 2.0), max: pt(4.0, 3.0) }
    }

    #[test]
    fn no_obstacles_means_free() {
        assert!(obstacle_free(pt(-100.0, 3.0), pt(100.0, -7.0), &[]));
    }

    #[test]
    fn circle_cases() {
        assert!(!obstacle_free(pt(0.0, 5.0), pt(10.0, 5.0), &[circle()]));
        assert!(obstacle_free(pt(0.0, 0.0), pt(10.0, 0.0), &[circle()]));
        // tangent counts as touching the closed disk
        assert!(!obstacle_free(pt(0.0, 6.0), pt(10.0, 6.0), &[circle()]));
        // stops short of the disk
        assert!(obstacle_free(pt(0.0, 5.0), pt(3.9, 5.0), &[circle()]));
        // fully inside
        assert!(!obstacle_free(pt(4.9, 5.0), pt(5.1, 5.1), &[circle()]));
    }

    #[test]
    fn rectangle_cases() {
        let r = [rect()];
        assert!(!obstacle_free(pt(0.0, 2.5), pt(10.0, 2.5), &r));
        assert!(obstacle_free(pt(0.0, 0.0), pt(10.0, 0.0), &r));
        assert!(!obstacle_free(pt(3.0, 2.5), pt(3.1, 2.6), &r));
        assert!(!obstacle_free(pt(1.0, 1.0), pt(5.0, 4.0), &r));
        assert!(obstacle_free(pt(0.0, 3.0), pt(1.9, 5.0), &r));
        // corner touch
        assert!(!obstacle_free(pt(3.0, 4.0), pt(5.0, 2.0), &r));
        // vertical segment beside the box
        assert!(obstacle_free(pt(4.5, 0.0), pt(4.5, 10.0), &r));
    }

    #[test]
    fn validation() {
        assert!(circle().validate().is_ok());
        assert!(ObstacleRegion::Circle { center: pt(0.0, 0.0), radius: 0.0 }.validate().is_err());
        assert!(ObstacleRegion::Rectangle { min: pt(1.0, 0.0), max: pt(0.0, 1.0) }.validate().is_err());
    }

    proptest! {
        // Exact tests agree with dense sampling whenever the sampled segment
        // clearly enters (sampling can only under-detect).
        #[test]
        fn sampling_never_finds_a_missed_hit(
            ax in -1.0..11.0f64, ay in -1.0..11.0f64, bx in -1.0..11.0f64, by in -1.0..11.0f64,
        ) {
            let (a, b) = (pt(ax, ay), pt(bx, by));
            for o in [circle(), rect()] {
                let sampled = (0..=2000).any(|i| o.contains(a.lerp(b, i as f64 / 2000.0)));
                if sampled {
                    prop_assert!(o.intersects_segment(a, b));
                }
            }
        }
    }
}
