//! The pullback metric `h` on the projection plane.
//!
//! A surface `s(x1, x2) = (x1, x2, x3(x1, x2), ..., xn(x1, x2))` inherits the
//! Euclidean inner product of `R^n` through its tangent basis
//! `(1, 0, dx3/dx1, ...)` and `(0, 1, dx3/dx2, ...)`. Writing `f_k` for the
//! extra coordinates,
//!
//! ```text
//! h11 = 1 + sum (df_k/dx1)^2
//! h12 = sum (df_k/dx1)(df_k/dx2)
//! h22 = 1 + sum (df_k/dx2)^2
//! ```
//!
//! so planar curve lengths under `h` equal the Euclidean lengths of their
//! lifts. Everything downstream (edge costs, geodesics) is built on this.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldJet, ScalarField2D, SmoothField};

/// Lower bound applied to `det h` before dividing by it.
const DET_FLOOR: f64 = 1e-15;

/// A point (or, where noted, a displacement) in the projection plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PlanarPoint {
    pub x1: f64,
    pub x2: f64,
}

impl PlanarPoint {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Displacement `other - self`.
    #[inline]
    pub fn delta_to(&self, other: PlanarPoint) -> [f64; 2] {
        [other.x1 - self.x1, other.x2 - self.x2]
    }

    #[inline]
    pub fn distance_sq(&self, other: PlanarPoint) -> f64 {
        let [d1, d2] = self.delta_to(other);
        d1 * d1 + d2 * d2
    }

    #[inline]
    pub fn distance(&self, other: PlanarPoint) -> f64 {
        self.distance_sq(other).sqrt()
    }

    /// `self + t (other - self)`
    #[inline]
    pub fn lerp(&self, other: PlanarPoint, t: f64) -> PlanarPoint {
        PlanarPoint::new(
            self.x1 + t * (other.x1 - self.x1),
            self.x2 + t * (other.x2 - self.x2),
        )
    }
}

impl From<[f64; 2]> for PlanarPoint {
    fn from([x1, x2]: [f64; 2]) -> Self {
        Self { x1, x2 }
    }
}

impl From<PlanarPoint> for [f64; 2] {
    fn from(p: PlanarPoint) -> Self {
        [p.x1, p.x2]
    }
}

/// Axis-aligned workspace rectangle in the projection plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub min: PlanarPoint,
    pub max: PlanarPoint,
}

impl Bounds {
    pub fn new(min: PlanarPoint, max: PlanarPoint) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min.x1 >= max.x1 || min.x2 >= max.x2 {
            return Err(Error::invalid(format!(
                "bounds need finite min < max componentwise, got {min:?} .. {max:?}"
            )));
        }
        Ok(Self { min, max })
    }

    /// `[lo, hi]^2`
    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Self::new(PlanarPoint::new(lo, lo), PlanarPoint::new(hi, hi))
    }

    pub fn contains(&self, p: PlanarPoint) -> bool {
        p.x1 >= self.min.x1 && p.x1 <= self.max.x1 && p.x2 >= self.min.x2 && p.x2 <= self.max.x2
    }

    pub fn width(&self) -> f64 {
        self.max.x1 - self.min.x1
    }

    pub fn height(&self) -> f64 {
        self.max.x2 - self.min.x2
    }

    pub fn center(&self) -> PlanarPoint {
        self.min.lerp(self.max, 0.5)
    }
}

/// Image of a planar point in the ambient space `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LiftedPoint(pub Vec<f64>);

impl LiftedPoint {
    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &LiftedPoint) -> f64 {
        euclidean_distance(&self.0, &other.0)
    }
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Symmetric positive-definite 2x2 metric tensor at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor2 {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    /// `h11 * h22 - h12^2`
    pub det: f64,
}

impl MetricTensor2 {
    pub const IDENTITY: MetricTensor2 = MetricTensor2 {
        h11: 1.0,
        h12: 0.0,
        h22: 1.0,
        det: 1.0,
    };

    pub fn new(h11: f64, h12: f64, h22: f64) -> Self {
        Self {
            h11,
            h12,
            h22,
            det: h11 * h22 - h12 * h12,
        }
    }

    /// `h(v, w)`
    #[inline]
    pub fn inner(&self, v: [f64; 2], w: [f64; 2]) -> f64 {
        self.h11 * v[0] * w[0] + self.h12 * (v[0] * w[1] + v[1] * w[0]) + self.h22 * v[1] * w[1]
    }

    #[inline]
    pub fn norm(&self, v: [f64; 2]) -> f64 {
        // Rounding can push a tiny quadratic form negative.
        self.inner(v, v).max(0.0).sqrt()
    }

    /// `[h^kl] = (1/d) [[h22, -h12], [-h12, h11]]`
    pub fn inverse(&self) -> InverseMetric {
        let inv_det = 1.0 / self.det.max(DET_FLOOR);
        InverseMetric {
            k11: self.h22 * inv_det,
            k12: -self.h12 * inv_det,
            k22: self.h11 * inv_det,
        }
    }
}

/// Inverse metric `[h^kl]`, symmetric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseMetric {
    pub k11: f64,
    pub k12: f64,
    pub k22: f64,
}

/// Christoffel symbols of the second kind `G^k_ij`, lower indices symmetric.
///
/// Field names read `g{k}_{ij}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChristoffelSymbols {
    pub g1_11: f64,
    pub g2_11: f64,
    pub g1_12: f64,
    pub g2_12: f64,
    pub g1_22: f64,
    pub g2_22: f64,
}

impl ChristoffelSymbols {
    /// `G^k_ij` with 0-based indices; `get(0, 1, 0) == get(0, 0, 1)`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        match (k, i.min(j), i.max(j)) {
            (0, 0, 0) => self.g1_11,
            (0, 0, 1) => self.g1_12,
            (0, 1, 1) => self.g1_22,
            (1, 0, 0) => self.g2_11,
            (1, 0, 1) => self.g2_12,
            (1, 1, 1) => self.g2_22,
            _ => panic!("christoffel index out of range: ({k}, {i}, {j})"),
        }
    }
}

/// The surface `s(x1, x2) = (x1, x2, f_3, ..., f_n)` as an ordered field list.
#[derive(Debug, Clone, Default)]
pub struct ManifoldModel {
    fields: Vec<Arc<dyn SmoothField>>,
}

impl ManifoldModel {
    /// The Euclidean plane (`n = 2`).
    pub fn flat() -> Self {
        Self::default()
    }

    pub fn new(fields: Vec<Arc<dyn SmoothField>>) -> Self {
        Self { fields }
    }

    pub fn from_bump_fields(fields: impl IntoIterator<Item = ScalarField2D>) -> Self {
        Self {
            fields: fields
                .into_iter()
                .map(|f| Arc::new(f) as Arc<dyn SmoothField>)
                .collect(),
        }
    }

    pub fn fields(&self) -> &[Arc<dyn SmoothField>] {
        &self.fields
    }

    /// `n`
    pub fn ambient_dim(&self) -> usize {
        2 + self.fields.len()
    }

    pub fn is_flat(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn metric_at(&self, p: PlanarPoint) -> MetricTensor2 {
        let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
        for f in &self.fields {
            let [g1, g2] = f.gradient(p);
            s11 += g1 * g1;
            s12 += g1 * g2;
            s22 += g2 * g2;
        }
        MetricTensor2::new(1.0 + s11, s12, 1.0 + s22)
    }

    pub fn lift(&self, p: PlanarPoint) -> LiftedPoint {
        let mut coords = Vec::with_capacity(self.ambient_dim());
        coords.push(p.x1);
        coords.push(p.x2);
        coords.extend(self.fields.iter().map(|f| f.value(p)));
        LiftedPoint(coords)
    }

    /// Push a planar tangent vector at `p` into `R^n`.
    pub fn pushforward(&self, p: PlanarPoint, v: [f64; 2]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ambient_dim());
        out.push(v[0]);
        out.push(v[1]);
        out.extend(self.fields.iter().map(|f| {
            let [g1, g2] = f.gradient(p);
            v[0] * g1 + v[1] * g2
        }));
        out
    }

    /// `||v||_h` at `p`.
    pub fn tangent_norm(&self, p: PlanarPoint, v: [f64; 2]) -> f64 {
        self.metric_at(p).norm(v)
    }

    pub fn christoffel_at(&self, p: PlanarPoint) -> ChristoffelSymbols {
        if self.fields.is_empty() {
            return ChristoffelSymbols::default();
        }
        let jets: Vec<FieldJet> = self.fields.iter().map(|f| f.jet(p)).collect();
        christoffel_from_jets(&jets)
    }

    /// Length under `h` of a piecewise-linear planar path, by composite
    /// 5-point Gauss-Legendre with `panels` panels per segment.
    pub fn curve_length(&self, path: &[PlanarPoint], panels: usize) -> Result<f64> {
        if path.len() < 2 {
            return Err(Error::invalid(format!(
                "curve length needs at least 2 points, got {}",
                path.len()
            )));
        }
        if panels == 0 {
            return Err(Error::invalid("curve length refinement must be >= 1"));
        }
        Ok(path
            .windows(2)
            .map(|w| self.segment_length(w[0], w[1], panels))
            .sum())
    }

    fn segment_length(&self, a: PlanarPoint, b: PlanarPoint, panels: usize) -> f64 {
        let delta = a.delta_to(b);
        if delta == [0.0, 0.0] {
            return 0.0;
        }
        let width = 1.0 / panels as f64;
        let mut total = 0.0;
        for panel in 0..panels {
            let mid = (panel as f64 + 0.5) * width;
            let mut acc = 0.0;
            for (node, weight) in GAUSS_LEGENDRE_5 {
                let t = mid + 0.5 * width * node;
                acc += weight * self.tangent_norm(a.lerp(b, t), delta);
            }
            total += 0.5 * width * acc;
        }
        total
    }
}

/// Nodes and weights on `[-1, 1]`.
const GAUSS_LEGENDRE_5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// For a graph surface the first-kind symbols are
/// `G_l,ij = sum_k (df_k/dx_l)(d2 f_k/dx_i dx_j)`; raise with `[h^kl]`.
fn christoffel_from_jets(jets: &[FieldJet]) -> ChristoffelSymbols {
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    // first[l][ij] with ij in (11, 12, 22)
    let mut first = [[0.0; 3]; 2];
    for jet in jets {
        let [g1, g2] = jet.gradient;
        s11 += g1 * g1;
        s12 += g1 * g2;
        s22 += g2 * g2;
        for (ij, hess) in jet.hessian.iter().enumerate() {
            first[0][ij] += g1 * hess;
            first[1][ij] += g2 * hess;
        }
    }
    let inv = MetricTensor2::new(1.0 + s11, s12, 1.0 + s22).inverse();
    let raise = |ij: usize| {
        (
            inv.k11 * first[0][ij] + inv.k12 * first[1][ij],
            inv.k12 * first[0][ij] + inv.k22 * first[1][ij],
        )
    };
    let (g1_11, g2_11) = raise(0);
    let (g1_12, g2_12) = raise(1);
    let (g1_22, g2_22) = raise(2);
    ChristoffelSymbols {
        g1_11,
        g2_11,
        g1_12,
        g2_12,
        g1_22,
        g2_22,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GaussianBump;
    use proptest::prelude::*;

    fn pt(x1: f64, x2: f64) -> PlanarPoint {
        PlanarPoint::new(x1, x2)
    }

    fn one_peak() -> ManifoldModel {
        ManifoldModel::from_bump_fields([ScalarField2D::new(vec![GaussianBump::isotropic(
            5.0,
            [5.0, 5.0],
            0.1,
        )
        .unwrap()])
        .unwrap()])
    }

    /// `f(x1, x2) = x1`
    #[derive(Debug)]
    struct LinearX1;

    impl SmoothField for LinearX1 {
        fn value(&self, p: PlanarPoint) -> f64 {
            p.x1
        }
        fn gradient(&self, _: PlanarPoint) -> [f64; 2] {
            [1.0, 0.0]
        }
        fn jet(&self, p: PlanarPoint) -> FieldJet {
            FieldJet {
                value: p.x1,
                gradient: [1.0, 0.0],
                hessian: [0.0; 3],
            }
        }
    }

    #[test]
    fn flat_metric_is_identity() {
        let h = ManifoldModel::flat().metric_at(pt(3.0, -2.0));
        assert_eq!(h, MetricTensor2::IDENTITY);
    }

    #[test]
    fn linear_field_doubles_h11() {
        let m = ManifoldModel::new(vec![Arc::new(LinearX1)]);
        let h = m.metric_at(pt(0.3, 9.0));
        assert_eq!((h.h11, h.h12, h.h22, h.det), (2.0, 0.0, 1.0, 2.0));
        assert_eq!(m.christoffel_at(pt(1.0, 1.0)), ChristoffelSymbols::default());
    }

    #[test]
    fn one_peak_metric_at_4_5() {
        let h = one_peak().metric_at(pt(4.0, 5.0));
        assert!((h.h11 - (1.0 + (-0.2f64).exp())).abs() < 1e-12);
        assert!((h.h11 - 1.818731).abs() < 1e-6);
        assert_eq!(h.h12, 0.0);
        assert_eq!(h.h22, 1.0);
    }

    #[test]
    fn inverse_of_simple_tensors() {
        let inv = MetricTensor2::IDENTITY.inverse();
        assert_eq!((inv.k11, inv.k12, inv.k22), (1.0, 0.0, 1.0));
        let inv = MetricTensor2::new(2.0, 0.0, 1.0).inverse();
        assert_eq!((inv.k11, inv.k12, inv.k22), (0.5, 0.0, 1.0));
    }

    #[test]
    fn lift_and_pushforward() {
        assert_eq!(ManifoldModel::flat().lift(pt(2.0, 3.0)).0, vec![2.0, 3.0]);
        assert_eq!(one_peak().lift(pt(5.0, 5.0)).0, vec![5.0, 5.0, 5.0]);
        assert_eq!(ManifoldModel::flat().pushforward(pt(1.0, 1.0), [0.4, -2.0]), vec![0.4, -2.0]);
        let v = one_peak().pushforward(pt(4.0, 5.0), [1.0, 0.0]);
        assert_eq!(v[..2], [1.0, 0.0]);
        assert!((v[2] - (-0.1f64).exp()).abs() < 1e-12);
        assert_eq!(one_peak().pushforward(pt(2.0, 7.0), [0.0, 0.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn tangent_norm_simple_cases() {
        assert_eq!(ManifoldModel::flat().tangent_norm(pt(0.0, 0.0), [3.0, 4.0]), 5.0);
        assert_eq!(one_peak().tangent_norm(pt(1.0, 2.0), [0.0, 0.0]), 0.0);
    }

    #[test]
    fn flat_christoffels_vanish() {
        assert_eq!(
            ManifoldModel::flat().christoffel_at(pt(4.0, 1.0)),
            ChristoffelSymbols::default()
        );
    }

    #[test]
    fn curve_length_flat_diagonal() {
        let len = ManifoldModel::flat()
            .curve_length(&[pt(0.0, 0.0), pt(10.0, 10.0)], 1)
            .unwrap();
        assert!((len - 200f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn curve_length_repeated_points_contribute_nothing() {
        let m = one_peak();
        let a = m.curve_length(&[pt(1.0, 1.0), pt(4.0, 6.0)], 8).unwrap();
        let b = m
            .curve_length(&[pt(1.0, 1.0), pt(1.0, 1.0), pt(4.0, 6.0), pt(4.0, 6.0)], 8)
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(m.curve_length(&[pt(2.0, 2.0), pt(2.0, 2.0)], 3).unwrap(), 0.0);
    }

    #[test]
    fn curve_length_rejects_short_paths() {
        let m = ManifoldModel::flat();
        assert!(m.curve_length(&[], 4).is_err());
        assert!(m.curve_length(&[pt(0.0, 0.0)], 4).is_err());
        assert!(m.curve_length(&[pt(0.0, 0.0), pt(1.0, 0.0)], 0).is_err());
    }

    #[test]
    fn curve_length_converges_faster_than_first_order() {
        let m = ManifoldModel::from_bump_fields([ScalarField2D::new(vec![
            GaussianBump::isotropic(7.0, [3.0, 3.0], 0.5).unwrap(),
            GaussianBump::isotropic(6.0, [7.0, 3.0], 0.5).unwrap(),
        ])
        .unwrap()]);
        let path = [pt(0.0, 0.0), pt(6.0, 4.0), pt(10.0, 10.0)];
        let l = |r| m.curve_length(&path, r).unwrap();
        let (l1, l2, l4) = (l(2), l(4), l(8));
        assert!((l4 - l2).abs() < (l2 - l1).abs(), "{l1} {l2} {l4}");
    }

    #[test]
    fn christoffel_get_is_lower_symmetric() {
        let c = one_peak().christoffel_at(pt(3.0, 6.5));
        for k in 0..2 {
            assert_eq!(c.get(k, 0, 1), c.get(k, 1, 0));
        }
        assert_eq!(c.get(0, 0, 0), c.g1_11);
        assert_eq!(c.get(1, 1, 1), c.g2_22);
    }

    fn tensor_strategy() -> impl Strategy<Value = MetricTensor2> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b, c, d)| {
            // Built like a pullback metric from two gradients.
            MetricTensor2::new(1.0 + a * a + c * c, a * b + c * d, 1.0 + b * b + d * d)
        })
    }

    proptest! {
        #[test]
        fn inverse_multiplies_back_to_identity(h in tensor_strategy()) {
            let k = h.inverse();
            let i11 = h.h11 * k.k11 + h.h12 * k.k12;
            let i12 = h.h11 * k.k12 + h.h12 * k.k22;
            let i21 = h.h12 * k.k11 + h.h22 * k.k12;
            let i22 = h.h12 * k.k12 + h.h22 * k.k22;
            prop_assert!((i11 - 1.0).abs() < 1e-12);
            prop_assert!(i12.abs() < 1e-12);
            prop_assert!(i21.abs() < 1e-12);
            prop_assert!((i22 - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pullback_tensor_is_positive_definite(h in tensor_strategy()) {
            prop_assert!(h.h11 >= 1.0 && h.h22 >= 1.0);
            prop_assert!(h.det >= 1.0 - 1e-9);
        }
    }
}
