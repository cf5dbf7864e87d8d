//! Points of `C^n`, the Hermitian product, automorphisms of the ball and
//! the Bergman metric.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Points closer than this to the unit sphere are rejected as interior points.
pub const BOUNDARY_GUARD: f64 = 1e-14;

/// A point of `C^n`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CPoint {
    coords: Vec<C64>,
}

impl CPoint {
    pub fn new(coords: Vec<C64>) -> Self {
        Self { coords }
    }

    /// Builds a point and rejects it unless it lies in the open unit ball.
    pub fn interior(coords: Vec<C64>) -> Result<Self> {
        let p = Self::new(coords);
        p.require_interior()?;
        Ok(p)
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Self::new(xs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); n])
    }

    /// The `j`-th standard basis vector of `C^n`.
    pub fn basis(n: usize, j: usize) -> Self {
        let mut p = Self::zero(n);
        p.coords[j] = C64::new(1.0, 0.0);
        p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `1 - |z|^2`.
    pub fn gap(&self) -> f64 {
        1.0 - self.norm_sq()
    }

    pub fn is_interior(&self) -> bool {
        self.norm() < 1.0 - BOUNDARY_GUARD
    }

    pub fn require_interior(&self) -> Result<()> {
        let norm = self.norm();
        if !norm.is_finite() || norm >= 1.0 - BOUNDARY_GUARD {
            return Err(Error::NotInterior { norm });
        }
        Ok(())
    }

    /// `<self, other> = sum self_j * conj(other_j)`.
    pub fn inner(&self, other: &CPoint) -> Result<C64> {
        check_dims(self, other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(z, w)| z * w.conj())
            .sum())
    }

    pub fn scale(&self, s: C64) -> CPoint {
        CPoint::new(self.coords.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &CPoint) -> Result<CPoint> {
        check_dims(self, other)?;
        Ok(CPoint::new(
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &CPoint) -> Result<CPoint> {
        check_dims(self, other)?;
        Ok(CPoint::new(
            self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self / |self|`, or `None` for the origin.
    pub fn normalized(&self) -> Option<CPoint> {
        let r = self.norm();
        (r > 0.0).then(|| self.scale(C64::new(1.0 / r, 0.0)))
    }
}

fn check_dims(a: &CPoint, b: &CPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// The involutive automorphism `phi_a` of the ball exchanging `a` and `0`,
/// written with the orthogonal projection onto the complex line through `a`.
#[derive(Clone, Debug)]
pub struct MobiusMap {
    center: CPoint,
}

impl MobiusMap {
    pub fn new(center: CPoint) -> Result<Self> {
        center.require_interior()?;
        Ok(Self { center })
    }

    pub fn center(&self) -> &CPoint {
        &self.center
    }

    pub fn apply(&self, z: &CPoint) -> Result<CPoint> {
        let a = &self.center;
        let za = z.inner(a)?;
        let denom = C64::new(1.0, 0.0) - za;
        let a2 = a.norm_sq();
        if a2 == 0.0 {
            return Ok(z.scale(C64::new(-1.0, 0.0)));
        }
        let sa = (1.0 - a2).sqrt();
        let proj = a.scale(za / a2);
        let coords = a
            .coords
            .iter()
            .zip(&proj.coords)
            .zip(&z.coords)
            .map(|((ai, pi), zi)| (ai - pi - (zi - pi) * sa) / denom)
            .collect();
        Ok(CPoint::new(coords))
    }
}

/// `phi_a(z)`.
pub fn mobius(a: &CPoint, z: &CPoint) -> Result<CPoint> {
    MobiusMap::new(a.clone())?.apply(z)
}

/// `1 - |phi_a(z)|^2` through the closed form
/// `(1-|a|^2)(1-|z|^2) / |1-<z,a>|^2`, which keeps full relative accuracy
/// when `phi_a(z)` is close to the sphere.
pub fn mobius_gap(a: &CPoint, z: &CPoint) -> Result<f64> {
    let u = C64::new(1.0, 0.0) - z.inner(a)?;
    Ok(a.gap() * z.gap() / u.norm_sqr())
}

/// Bergman distance `beta(z, a) = 1/2 log((1+|phi_a(z)|)/(1-|phi_a(z)|))`.
pub fn bergman_metric(z: &CPoint, a: &CPoint) -> Result<f64> {
    z.require_interior()?;
    a.require_interior()?;
    let g = mobius_gap(a, z)?.min(1.0);
    let rho = (1.0 - g).max(0.0).sqrt();
    // (1+rho)/(1-rho) = (1+rho)^2 / (1-rho^2)
    Ok((1.0 + rho).ln() - 0.5 * g.ln())
}

/// Membership in the Bergman ball `D(center, radius)`.
pub fn in_bergman_ball(center: &CPoint, radius: f64, z: &CPoint) -> Result<bool> {
    Ok(bergman_metric(z, center)? < radius)
}

/// A complex line `{lambda * e}` through the origin together with the
/// coordinates of a set of points on it.
#[derive(Clone, Debug)]
pub struct ComplexLine {
    pub direction: CPoint,
    pub coordinates: Vec<C64>,
}

/// Finds a unit vector `e` with every point equal to `<p, e> e`, when such a
/// line exists. Points at the origin lie on every line.
pub fn common_line(points: &[&CPoint], dim: usize) -> Option<ComplexLine> {
    let lead = points
        .iter()
        .copied()
        .max_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()));
    let direction = match lead.and_then(|p| p.normalized()) {
        Some(e) => e,
        None => CPoint::basis(dim, 0),
    };
    let mut coordinates = Vec::with_capacity(points.len());
    for p in points {
        let s = p.inner(&direction).ok()?;
        let resid = p.sub(&direction.scale(s)).ok()?.norm();
        if resid > 1e-12 * p.norm().max(1e-300) && resid > 1e-15 {
            return None;
        }
        coordinates.push(s);
    }
    Some(ComplexLine { direction, coordinates })
}
