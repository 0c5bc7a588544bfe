//! The one-column Stiefel manifold: the unit hypersphere.
//!
//! Great circles are available in closed form, so the generator built on them
//! ([`sphere_gen`]) runs in linear time and needs no page matrix.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::signal::{smooth, TimeSeries};

const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    p: DVector<f64>,
}

impl SpherePoint {
    pub fn new(p: DVector<f64>) -> Result<Self> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sphere point"));
        }
        let norm = p.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotOrthonormal {
                defect: (norm - 1.0).abs(),
            });
        }
        Ok(SpherePoint { p })
    }

    /// Normalizes a nonzero vector, returning the point and the removed norm.
    pub fn from_vector(v: &DVector<f64>) -> Result<(Self, f64)> {
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Degenerate("zero vector has no direction"));
        }
        if !norm.is_finite() {
            return Err(Error::NonFinite("sphere point"));
        }
        Ok((SpherePoint { p: v / norm }, norm))
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.p
    }
}

/// A velocity orthogonal to its base point.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereTangent {
    v: DVector<f64>,
    base: SpherePoint,
}

impl SphereTangent {
    pub fn new(base: &SpherePoint, v: DVector<f64>) -> Result<Self> {
        if v.len() != base.p.len() {
            return Err(Error::dims((base.p.len(), 1), (v.len(), 1)));
        }
        let defect = base.p.dot(&v).abs();
        if !(defect <= UNIT_TOL) {
            return Err(Error::NotTangent { defect });
        }
        Ok(SphereTangent { v, base: base.clone() })
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }
}

/// Standard-normal draw projected onto the tangent space at `base`, shrunk to
/// length `boundary` only when it is longer.
pub fn sphere_random_tangent<R: Rng + ?Sized>(base: &SpherePoint, boundary: f64, rng: &mut R) -> Result<SphereTangent> {
    if !(boundary > 0.0 && boundary.is_finite()) {
        return Err(Error::Range {
            name: "boundary",
            value: boundary,
            range: "(0, inf)",
        });
    }
    let p = &base.p;
    let raw = DVector::<f64>::from_fn(p.len(), |_, _| rng.sample(StandardNormal));
    let mut v = &raw - p * p.dot(&raw);
    let norm = v.norm();
    if norm > boundary {
        v *= boundary / norm;
    }
    Ok(SphereTangent { v, base: base.clone() })
}

/// Closed-form great circle `p cos(‖v‖t) + (v/‖v‖) sin(‖v‖t)`.
///
/// No tangency check: this is the raw formula, evaluated for any `p` and `v`.
/// A zero velocity returns `p`.
pub fn great_circle(p: &DVector<f64>, v: &DVector<f64>, t: f64) -> DVector<f64> {
    let speed = v.norm();
    if speed == 0.0 {
        return p.clone();
    }
    let angle = speed * t;
    p * angle.cos() + v * (angle.sin() / speed)
}

pub fn sphere_geodesic(base: &SpherePoint, v: &SphereTangent, t: f64) -> SpherePoint {
    SpherePoint {
        p: great_circle(&base.p, &v.v, t),
    }
}

/// Parameters of [`sphere_gen`]. Defaults: `t = 1`, `boundary = π/6`,
/// `smooth_len = 20`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGenConfig {
    pub t: f64,
    pub boundary: f64,
    pub smooth_len: usize,
}

impl Default for SphereGenConfig {
    fn default() -> Self {
        SphereGenConfig {
            t: 1.0,
            boundary: PI / 6.0,
            smooth_len: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SphereGenOutput {
    /// Rescaled geodesic endpoint before smoothing.
    pub raw: TimeSeries,
    pub smoothed: TimeSeries,
    pub tangent: SphereTangent,
    /// Norm of the input, the singular value of the one-column SVD.
    pub sigma: f64,
}

/// Moves the normalized signal along a random great circle and restores its
/// magnitude.
pub fn sphere_gen<R: Rng + ?Sized>(signal: &TimeSeries, config: &SphereGenConfig, rng: &mut R) -> Result<SphereGenOutput> {
    if signal.len() < 2 {
        return Err(Error::Length {
            len: signal.len(),
            required: 2,
        });
    }
    let x = DVector::from_column_slice(signal.values());
    let (base, sigma) = SpherePoint::from_vector(&x).map_err(|e| match e {
        Error::Degenerate(_) => Error::Degenerate("signal is identically zero"),
        other => other,
    })?;
    let tangent = sphere_random_tangent(&base, config.boundary, rng)?;
    let moved = sphere_geodesic(&base, &tangent, config.t);
    let raw_values: Vec<f64> = (moved.p * sigma).iter().copied().collect();
    let mut raw = TimeSeries::new(raw_values)?;
    if let Some(dt) = signal.sample_interval() {
        raw = raw.with_sample_interval(dt)?;
    }
    let smoothed = smooth(&raw, config.smooth_len)?;
    Ok(SphereGenOutput {
        raw,
        smoothed,
        tangent,
        sigma,
    })
}
