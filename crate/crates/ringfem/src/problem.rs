//! Problem data: diffusion weights, right-hand sides, and the interface flux.

use crate::geometry::{AnnularGeometry, Region};
use crate::{Error, Result};

/// Which right-hand side the run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataCase {
    /// Constant loads `f₊ = f₋ = 1` (the layer benchmark); the interface flux
    /// defaults to 0 and can be overridden for diagnostics.
    Const,
    /// Data chosen so the exact solution is the smooth polynomial
    /// `u = (r-a)(c-r)` on the whole annulus; exercises every term of the
    /// weak form, including a nonzero interface flux when `b ≠ (a+c)/2`.
    Manufactured,
}

/// The full coefficient/data bundle for one solve.
#[derive(Debug, Clone)]
pub struct TransmissionProblem {
    pub geom: AnnularGeometry,
    pub eps: f64,
    pub case: DataCase,
    /// Multiplies the assembled interface load term.  `+1.0` is the
    /// self-consistent convention (the manufactured case fails loudly with
    /// the opposite sign); kept as a switch for exactly that diagnostic.
    pub h_sign: f64,
    f_plus: f64,
    f_minus: f64,
    h_const: f64,
}

impl TransmissionProblem {
    pub fn new(geom: AnnularGeometry, eps: f64, case: DataCase) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::Config(format!(
                "perturbation parameter must lie in (0, 1], got {eps}"
            )));
        }
        Ok(Self { geom, eps, case, h_sign: 1.0, f_plus: 1.0, f_minus: 1.0, h_const: 0.0 })
    }

    /// Replace the constant loads of the `Const` case (default `1, 1`).
    pub fn with_loads(mut self, f_plus: f64, f_minus: f64) -> Self {
        self.f_plus = f_plus;
        self.f_minus = f_minus;
        self
    }

    /// Replace the interface flux datum of the `Const` case (default `0`).
    pub fn with_interface_flux(mut self, h: f64) -> Self {
        self.h_const = h;
        self
    }

    /// Flip or keep the sign applied to the assembled interface term.
    pub fn with_h_sign(mut self, sign: f64) -> Self {
        self.h_sign = sign;
        self
    }

    /// Diffusion weight: `ε²` in the inner region, `1` in the outer.
    pub fn weight(&self, region: Region) -> f64 {
        match region {
            Region::Plus => self.eps * self.eps,
            Region::Minus => 1.0,
        }
    }

    /// Load at radius `r` (the built-in data are radial).
    pub fn f_at(&self, r: f64, region: Region) -> f64 {
        match self.case {
            DataCase::Const => match region {
                Region::Plus => self.f_plus,
                Region::Minus => self.f_minus,
            },
            DataCase::Manufactured => {
                // u = (r-a)(c-r) has Δu = u'' + u'/r = -4 + (a+c)/r,
                // so f = -w Δu + u with the region weight w
                let g = &self.geom;
                let u = (r - g.a) * (g.c - r);
                let lap = -4.0 + (g.a + g.c) / r;
                -self.weight(region) * lap + u
            }
        }
    }

    /// Interface flux datum `h` in `ε² ∂u₊/∂ν - ∂u₋/∂ν = h` with ν pointing
    /// out of the inner region.
    pub fn h_datum(&self) -> f64 {
        match self.case {
            DataCase::Const => self.h_const,
            // h = (ε² - 1) u'(b) with u' = a + c - 2r
            DataCase::Manufactured => {
                let g = &self.geom;
                (self.eps * self.eps - 1.0) * (g.a + g.c - 2.0 * g.b)
            }
        }
    }

    /// The constant loads `(f₊, f₋)`; meaningful for the `Const` case.
    pub fn const_loads(&self) -> (f64, f64) {
        (self.f_plus, self.f_minus)
    }
}
