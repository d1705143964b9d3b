//! Annulus geometry: radii, regions, and boundary-fitted tube frames.
//!
//! The computational domain is the annulus `a < r < c` with the interface
//! circle `Σ : r = b`.  All boundary curves are concentric circles, so the
//! general boundary-fitted map `ψ(ρ, θ) = x₀(θ) - ρ n(θ)` (foot point minus
//! depth times outward normal) specializes to `(R ± ρ)(cos θ, sin θ)`.

use crate::{Error, Result};

/// Which side of the interface a point or element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Inner ring `a < r < b`, carrying the `ε²` diffusion weight.
    Plus,
    /// Outer ring `b < r < c`, unweighted.
    Minus,
}

/// Annulus `a < r < c` split at `r = b`, plus the tube depths used by the
/// layer constructions.
///
/// `rho0` bounds the collar around the outer Dirichlet circle `r = a` of
/// `Ω₊` (validity requires `rho0 < a`, the reciprocal of the largest
/// boundary curvature `1/a`); `rho_sigma` bounds the collar around `Σ`
/// (validity requires `rho_sigma < b` and that the collar stays inside the
/// neighbouring rings).
#[derive(Debug, Clone, Copy)]
pub struct AnnularGeometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub rho0: f64,
    pub rho_sigma: f64,
}

impl AnnularGeometry {
    /// Geometry with the default tube depths `rho0 = a/2` and
    /// `rho_sigma = min(b-a, c-b)/2` (additionally capped by `b/2` so it
    /// always stays below the curvature bound `1/κ_Σ = b`).
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let rho0 = 0.5 * a;
        let rho_sigma = (0.5 * (b - a).min(c - b)).min(0.5 * b);
        Self::with_tube_depths(a, b, c, rho0, rho_sigma)
    }

    pub fn with_tube_depths(a: f64, b: f64, c: f64, rho0: f64, rho_sigma: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(0.0 < a && a < b && b < c) {
            return Err(Error::Config(format!(
                "radii must satisfy 0 < a < b < c, got ({a}, {b}, {c})"
            )));
        }
        if !(0.0 < rho0 && rho0 < a) {
            return Err(Error::Config(format!(
                "tube depth rho0 = {rho0} must lie in (0, a) = (0, {a})"
            )));
        }
        if !(0.0 < rho_sigma && rho_sigma < b) {
            return Err(Error::Config(format!(
                "tube depth rho_sigma = {rho_sigma} must lie in (0, b) = (0, {b})"
            )));
        }
        Ok(Self { a, b, c, rho0, rho_sigma })
    }

    /// Region of radius `r`; the interface circle itself is attributed to
    /// `Minus` (matching the side whose trace carries the interface load).
    pub fn region_of(&self, r: f64) -> Region {
        if r < self.b {
            Region::Plus
        } else {
            Region::Minus
        }
    }

    /// Radial extent `(lo, hi)` of a region.
    pub fn radial_span(&self, region: Region) -> (f64, f64) {
        match region {
            Region::Plus => (self.a, self.b),
            Region::Minus => (self.b, self.c),
        }
    }

    /// Cartesian point on the circle of radius `r` at angle `theta`.
    pub fn circle_point(r: f64, theta: f64) -> [f64; 2] {
        [r * theta.cos(), r * theta.sin()]
    }

    /// Frame on the outer Dirichlet circle of `Ω₊` (`r = a`), depth grows
    /// into the domain (`r = a + ρ`).
    pub fn frame_at_a(&self) -> BoundaryFittedFrame {
        BoundaryFittedFrame { radius: self.a, inward: 1.0, depth: self.rho0 }
    }

    /// Frame on the interface seen from `Ω₊` (`r = b - ρ`).
    pub fn frame_at_interface(&self) -> BoundaryFittedFrame {
        BoundaryFittedFrame { radius: self.b, inward: -1.0, depth: self.rho_sigma }
    }
}

/// Tube coordinates `(ρ, θ)` attached to one boundary circle: the point at
/// depth `ρ` is `(radius + inward·ρ)(cos θ, sin θ)`.
///
/// `inward = +1` walks to larger radii, `-1` to smaller; `depth` is the
/// validity bound `ρ < depth` (strictly below the curvature radius).
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFittedFrame {
    pub radius: f64,
    pub inward: f64,
    pub depth: f64,
}

impl BoundaryFittedFrame {
    /// Curvature of the anchoring circle.
    pub fn curvature(&self) -> f64 {
        1.0 / self.radius
    }

    /// Map tube coordinates to a Cartesian point.  Errors outside the
    /// validity range `0 <= ρ < depth`.
    pub fn psi(&self, rho: f64, theta: f64) -> Result<[f64; 2]> {
        if !(0.0..self.depth).contains(&rho) {
            return Err(Error::Config(format!(
                "tube depth rho = {rho} outside validity range [0, {})",
                self.depth
            )));
        }
        Ok(AnnularGeometry::circle_point(self.radius + self.inward * rho, theta))
    }

    /// Radius of the depth-`ρ` offset circle (no validity check).
    pub fn offset_radius(&self, rho: f64) -> f64 {
        self.radius + self.inward * rho
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_depths_for_reference_radii() {
        let g = AnnularGeometry::new(1.0, 2.0, 3.0).unwrap();
        assert_abs_diff_eq!(g.rho0, 0.5);
        assert_abs_diff_eq!(g.rho_sigma, 0.5);
        assert!(g.rho0 < g.a && g.rho_sigma < g.b);
    }

    #[test]
    fn invalid_radii_are_rejected() {
        assert!(AnnularGeometry::new(0.0, 2.0, 3.0).is_err());
        assert!(AnnularGeometry::new(2.0, 1.0, 3.0).is_err());
        assert!(AnnularGeometry::new(1.0, 2.0, 2.0).is_err());
        assert!(AnnularGeometry::new(-1.0, 2.0, 3.0).is_err());
        assert!(AnnularGeometry::new(1.0, f64::NAN, 3.0).is_err());
        assert!(AnnularGeometry::with_tube_depths(1.0, 2.0, 3.0, 1.5, 0.5).is_err());
    }

    #[test]
    fn psi_specializes_to_offset_circles() {
        let g = AnnularGeometry::new(1.0, 2.0, 3.0).unwrap();
        let fa = g.frame_at_a();
        let fs = g.frame_at_interface();
        for &theta in &[0.0, 0.7, 2.0, 5.5] {
            let p = fa.psi(0.25, theta).unwrap();
            let q = AnnularGeometry::circle_point(1.25, theta);
            assert_abs_diff_eq!(p[0], q[0], epsilon = 1e-15);
            assert_abs_diff_eq!(p[1], q[1], epsilon = 1e-15);
            let p = fs.psi(0.25, theta).unwrap();
            let q = AnnularGeometry::circle_point(1.75, theta);
            assert_abs_diff_eq!(p[0], q[0], epsilon = 1e-15);
            assert_abs_diff_eq!(p[1], q[1], epsilon = 1e-15);
        }
        // depth zero is the anchoring circle itself
        let p = fs.psi(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(p[0], 2.0 * 1.0f64.cos(), epsilon = 1e-15);
        // outside the validity tube
        assert!(fa.psi(0.5, 0.0).is_err());
        assert!(fa.psi(-0.1, 0.0).is_err());
    }

    #[test]
    fn region_attribution() {
        let g = AnnularGeometry::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(g.region_of(1.5), Region::Plus);
        assert_eq!(g.region_of(2.0), Region::Minus);
        assert_eq!(g.region_of(2.5), Region::Minus);
    }
}
