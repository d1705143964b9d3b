//! Regime-dependent layer meshes on the annulus.
//!
//! When `κpε < 1/2` the inner ring gets two anisotropic *needle* bands of
//! width `κpε` — one hugging `r = a`, one hugging the interface from inside —
//! with the remaining bulk strip split into two equal bands; the outer ring,
//! whose solution stays smooth, gets a plain three-band split.  The width
//! `κpε` is what makes degree-`p` polynomials resolve an `e^{−dist/ε}` layer
//! uniformly in ε: the leftover tail beyond the needle has size `e^{−κp}`,
//! which at `κ = 1` already decays at the target exponential rate.  When `κpε ≥ 1/2` the layers are already resolved
//! by polynomials and both rings get regular two-band splits.  Either way the
//! element count depends only on the regime and the sector count `m`, never
//! on ε.
//!
//! Elements are curved quadrilaterals `[r₀,r₁]×[θ₀,θ₁]` with the exact polar
//! map (no isoparametric approximation): the geometry error is zero and the
//! Jacobian is analytic.

use crate::geometry::{AnnularGeometry, Region};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `κpε ≥ 1/2`: regular mesh, no needle bands.
    Asymptotic,
    /// `κpε < 1/2`: needle bands in the inner ring.
    Preasymptotic,
}

/// Role of a radial band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    /// Needle band along the Dirichlet circle `r = a`.
    BoundaryNeedle,
    /// Needle band along the interface, inner side.
    InterfaceNeedle,
    Bulk,
}

impl Band {
    pub fn tag(self) -> &'static str {
        match self {
            Band::BoundaryNeedle => "boundary-needle",
            Band::InterfaceNeedle => "interface-needle",
            Band::Bulk => "bulk",
        }
    }
}

/// One curved quadrilateral `[r0,r1] × [t0,t1]`.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub r0: f64,
    pub r1: f64,
    pub t0: f64,
    pub t1: f64,
    /// Radial band index, 0 at `r = a`.
    pub band_index: usize,
    /// Angular sector index, 0 at `θ = 0`.
    pub sector: usize,
    pub region: Region,
    pub band: Band,
}

impl Element {
    pub fn dr(&self) -> f64 {
        self.r1 - self.r0
    }

    pub fn dt(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Reference square to polar coordinates.
    pub fn polar(&self, xi: f64, eta: f64) -> (f64, f64) {
        (
            self.r0 + 0.5 * (xi + 1.0) * self.dr(),
            self.t0 + 0.5 * (eta + 1.0) * self.dt(),
        )
    }

    /// Reference square to Cartesian coordinates.
    pub fn map(&self, xi: f64, eta: f64) -> [f64; 2] {
        let (r, t) = self.polar(xi, eta);
        [r * t.cos(), r * t.sin()]
    }

    /// Point, analytic Jacobian `[[∂x/∂ξ, ∂x/∂η], [∂y/∂ξ, ∂y/∂η]]`, and its
    /// determinant `r·(Δr/2)·(Δθ/2)`.
    pub fn map_full(&self, xi: f64, eta: f64) -> ([f64; 2], [[f64; 2]; 2], f64) {
        assert!(
            (-1.0..=1.0).contains(&xi) && (-1.0..=1.0).contains(&eta),
            "reference coordinates ({xi}, {eta}) outside the unit square"
        );
        let (r, t) = self.polar(xi, eta);
        let (hr, ht) = (0.5 * self.dr(), 0.5 * self.dt());
        let (ct, st) = (t.cos(), t.sin());
        let jac = [[ct * hr, -r * st * ht], [st * hr, r * ct * ht]];
        ([r * ct, r * st], jac, r * hr * ht)
    }

    /// Jacobian determinant at radial reference coordinate `xi` (independent
    /// of `eta`).
    pub fn det(&self, xi: f64) -> f64 {
        let r = self.r0 + 0.5 * (xi + 1.0) * self.dr();
        r * 0.25 * self.dr() * self.dt()
    }
}

/// The assembled mesh: radial breakpoints shared by all sectors, uniform
/// angular sectors, elements in band-major order.
#[derive(Debug, Clone)]
pub struct LayerMesh {
    pub geom: AnnularGeometry,
    pub regime: Regime,
    pub m: usize,
    pub p: usize,
    pub eps: f64,
    pub kappa: f64,
    /// Strictly increasing radial breakpoints from `a` to `c`, containing `b`.
    pub breaks: Vec<f64>,
    /// `(region, band)` per radial band; `breaks.len() - 1` entries.
    pub band_info: Vec<(Region, Band)>,
    /// Needle widths; zero in the asymptotic regime.
    pub w_bl: f64,
    pub w_il: f64,
    pub elements: Vec<Element>,
}

impl LayerMesh {
    pub fn radial_bands(&self) -> usize {
        self.band_info.len()
    }

    /// Index of the radial breakpoint sitting on the interface.
    pub fn interface_break(&self) -> usize {
        self.band_info.iter().position(|&(reg, _)| reg == Region::Minus).unwrap()
    }

    pub fn element(&self, band_index: usize, sector: usize) -> &Element {
        &self.elements[band_index * self.m + sector]
    }

    /// JSON dump with 17-significant-digit floats.
    pub fn to_json(&self) -> String {
        let regime = match self.regime {
            Regime::Asymptotic => "asymptotic",
            Regime::Preasymptotic => "preasymptotic",
        };
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"regime\": \"{regime}\",\n"));
        out.push_str(&format!("  \"m\": {},\n", self.m));
        out.push_str(&format!("  \"p\": {},\n", self.p));
        out.push_str(&format!("  \"eps\": {},\n", fmt_float(self.eps)));
        out.push_str(&format!("  \"kappa\": {},\n", fmt_float(self.kappa)));
        out.push_str("  \"elements\": [\n");
        for (i, e) in self.elements.iter().enumerate() {
            let region = match e.region {
                Region::Plus => "plus",
                Region::Minus => "minus",
            };
            out.push_str(&format!(
                "    {{\"r0\": {}, \"r1\": {}, \"t0\": {}, \"t1\": {}, \"region\": \"{}\", \"band\": \"{}\"}}{}\n",
                fmt_float(e.r0),
                fmt_float(e.r1),
                fmt_float(e.t0),
                fmt_float(e.t1),
                region,
                e.band.tag(),
                if i + 1 < self.elements.len() { "," } else { "" }
            ));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

/// 17 significant digits, plain JSON number.
pub(crate) fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Build the regime-dependent mesh.  Tube depths come from the geometry;
/// `kappa` is the needle-width constant.
pub fn build_mesh(
    geom: &AnnularGeometry,
    eps: f64,
    p: usize,
    kappa: f64,
    m: usize,
) -> Result<LayerMesh> {
    if m < 4 {
        return Err(Error::Config(format!("need at least 4 angular sectors, got {m}")));
    }
    if p < 1 {
        return Err(Error::Config("polynomial degree must be at least 1".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!(
            "perturbation parameter must lie in (0, 1], got {eps}"
        )));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Config(format!("mesh constant kappa must be positive, got {kappa}")));
    }
    let (a, b, c) = (geom.a, geom.b, geom.c);
    if geom.rho_sigma >= (b - a).min(b) {
        return Err(Error::Config(format!(
            "tube depth rho_sigma = {} must stay below min(b-a, b) = {}",
            geom.rho_sigma,
            (b - a).min(b)
        )));
    }

    let lam = kappa * p as f64 * eps;
    let (regime, breaks, band_info, w_bl, w_il): (_, Vec<f64>, Vec<(Region, Band)>, f64, f64) =
        if lam >= 0.5 {
            (
                Regime::Asymptotic,
                vec![a, 0.5 * (a + b), b, 0.5 * (b + c), c],
                vec![
                    (Region::Plus, Band::Bulk),
                    (Region::Plus, Band::Bulk),
                    (Region::Minus, Band::Bulk),
                    (Region::Minus, Band::Bulk),
                ],
                0.0,
                0.0,
            )
        } else {
            let w_bl = lam;
            let w_il = lam;
            let half = 0.5 * (b - a);
            if w_bl >= half || w_il >= half {
                return Err(Error::DegenerateMesh(format!(
                    "needle widths (w_bl = {w_bl:e}, w_il = {w_il:e}) reach half the inner ring \
                     thickness {half:e}; the band layout would collapse"
                )));
            }
            let lo = a + w_bl;
            let hi = b - w_il;
            let mid = 0.5 * (lo + hi);
            (
                Regime::Preasymptotic,
                vec![a, lo, mid, hi, b, b + (c - b) / 3.0, b + 2.0 * (c - b) / 3.0, c],
                vec![
                    (Region::Plus, Band::BoundaryNeedle),
                    (Region::Plus, Band::Bulk),
                    (Region::Plus, Band::Bulk),
                    (Region::Plus, Band::InterfaceNeedle),
                    (Region::Minus, Band::Bulk),
                    (Region::Minus, Band::Bulk),
                    (Region::Minus, Band::Bulk),
                ],
                w_bl,
                w_il,
            )
        };

    debug_assert!(breaks.windows(2).all(|w| w[0] < w[1]));

    let tau = std::f64::consts::TAU;
    let mut elements = Vec::with_capacity(band_info.len() * m);
    for (bi, &(region, band)) in band_info.iter().enumerate() {
        for s in 0..m {
            elements.push(Element {
                r0: breaks[bi],
                r1: breaks[bi + 1],
                t0: tau * s as f64 / m as f64,
                t1: tau * (s + 1) as f64 / m as f64,
                band_index: bi,
                sector: s,
                region,
                band,
            });
        }
    }

    Ok(LayerMesh {
        geom: *geom,
        regime,
        m,
        p,
        eps,
        kappa,
        breaks,
        band_info,
        w_bl,
        w_il,
        elements,
    })
}
