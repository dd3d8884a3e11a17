//! Smooth scalar fields over the projection plane.
//!
//! Every extra embedding coordinate (height, ground resistance, ...) is a
//! [`SmoothField`]. The shipped family is [`ScalarField2D`], a finite sum of
//! anisotropic Gaussian bumps with closed-form first and second derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::PlanarPoint;

/// Value, gradient and Hessian of a field at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldJet {
    pub value: f64,
    pub gradient: [f64; 2],
    /// `[f_11, f_12, f_22]`; the mixed partial is stored once.
    pub hessian: [f64; 3],
}

impl FieldJet {
    fn accumulate(&mut self, other: &FieldJet) {
        self.value += other.value;
        self.gradient[0] += other.gradient[0];
        self.gradient[1] += other.gradient[1];
        self.hessian[0] += other.hessian[0];
        self.hessian[1] += other.hessian[1];
        self.hessian[2] += other.hessian[2];
    }
}

/// A twice continuously differentiable function of `(x1, x2)`.
pub trait SmoothField: std::fmt::Debug + Send + Sync {
    fn value(&self, p: PlanarPoint) -> f64;

    fn gradient(&self, p: PlanarPoint) -> [f64; 2];

    /// Value, gradient and Hessian together. Implementations should override
    /// this when the three share work (they do for Gaussian bumps).
    fn jet(&self, p: PlanarPoint) -> FieldJet;
}

/// `A * exp(-a1 (x1 - c1)^2 - a2 (x2 - c2)^2)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub decay: [f64; 2],
}

impl GaussianBump {
    pub fn new(amplitude: f64, center: [f64; 2], decay: [f64; 2]) -> Result<Self> {
        let bump = Self {
            amplitude,
            center,
            decay,
        };
        bump.validate()?;
        Ok(bump)
    }

    /// Bump with equal decay along both axes.
    pub fn isotropic(amplitude: f64, center: [f64; 2], decay: f64) -> Result<Self> {
        Self::new(amplitude, center, [decay, decay])
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.amplitude.is_finite()
            && self.center.iter().all(|c| c.is_finite())
            && self.decay.iter().all(|a| a.is_finite());
        if !finite {
            return Err(Error::invalid("gaussian bump has non-finite parameters"));
        }
        if self.decay[0] <= 0.0 || self.decay[1] <= 0.0 {
            return Err(Error::invalid(format!(
                "gaussian bump decay must be strictly positive, got {:?}",
                self.decay
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn value(&self, p: PlanarPoint) -> f64 {
        let d1 = p.x1 - self.center[0];
        let d2 = p.x2 - self.center[1];
        self.amplitude * (-self.decay[0] * d1 * d1 - self.decay[1] * d2 * d2).exp()
    }

    #[inline]
    pub fn gradient(&self, p: PlanarPoint) -> [f64; 2] {
        let [a1, a2] = self.decay;
        let d1 = p.x1 - self.center[0];
        let d2 = p.x2 - self.center[1];
        let v = self.amplitude * (-a1 * d1 * d1 - a2 * d2 * d2).exp();
        [-2.0 * a1 * d1 * v, -2.0 * a2 * d2 * v]
    }

    #[inline]
    pub fn jet(&self, p: PlanarPoint) -> FieldJet {
        let [a1, a2] = self.decay;
        let d1 = p.x1 - self.center[0];
        let d2 = p.x2 - self.center[1];
        let v = self.amplitude * (-a1 * d1 * d1 - a2 * d2 * d2).exp();
        let g1 = -2.0 * a1 * d1;
        let g2 = -2.0 * a2 * d2;
        FieldJet {
            value: v,
            gradient: [g1 * v, g2 * v],
            hessian: [(g1 * g1 - 2.0 * a1) * v, g1 * g2 * v, (g2 * g2 - 2.0 * a2) * v],
        }
    }
}

/// Sum of Gaussian bumps. The empty sum is the zero field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarField2D {
    pub bumps: Vec<GaussianBump>,
}

impl ScalarField2D {
    pub fn new(bumps: Vec<GaussianBump>) -> Result<Self> {
        for b in &bumps {
            b.validate()?;
        }
        Ok(Self { bumps })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn hessian(&self, p: PlanarPoint) -> [f64; 3] {
        self.jet(p).hessian
    }
}

impl SmoothField for ScalarField2D {
    fn value(&self, p: PlanarPoint) -> f64 {
        self.bumps.iter().map(|b| b.value(p)).sum()
    }

    fn gradient(&self, p: PlanarPoint) -> [f64; 2] {
        self.bumps.iter().fold([0.0, 0.0], |acc, b| {
            let g = b.gradient(p);
            [acc[0] + g[0], acc[1] + g[1]]
        })
    }

    fn jet(&self, p: PlanarPoint) -> FieldJet {
        let mut out = FieldJet::default();
        for b in &self.bumps {
            out.accumulate(&b.jet(p));
        }
        out
    }
}
