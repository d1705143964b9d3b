//! The conforming degree-`p` tensor-product space on a layer mesh.
//!
//! Global numbering is index arithmetic on the structured grid of
//! Gauss-Lobatto lines — `k·p + 1` radial lines by `m·p` angular lines (the
//! angular direction is periodic) — so node coincidence across element
//! edges, across the interface, and across the `θ = 0/2π` seam is exact by
//! construction, never a floating-point comparison.  Grid ids are ring-major
//! (`g = ir·n_t + it`), which keeps the factorization profile narrow.
//! Dirichlet lines are exactly `ir = 0` and `ir = k·p`; free ids number the
//! remaining grid ids in order.

use crate::mesh::{Element, LayerMesh};
use crate::quadrature::NodalBasis1D;

#[derive(Debug)]
pub struct FeSpace {
    pub p: usize,
    pub m: usize,
    /// Radial bands `k`.
    pub n_bands: usize,
    /// Radial grid lines `k·p + 1`.
    pub n_r: usize,
    /// Angular grid lines `m·p` (periodic).
    pub n_t: usize,
    /// Total structured-grid DOFs before Dirichlet elimination.
    pub n_grid: usize,
    /// Free DOFs `(k·p - 1)·m·p`.
    pub n_free: usize,
    pub basis: NodalBasis1D,
    /// Grid id → free id; `None` on the two Dirichlet circles.
    pub free_of_grid: Vec<Option<usize>>,
    pub grid_of_free: Vec<usize>,
    /// Radius of each radial grid line.
    pub radii: Vec<f64>,
    /// Angle of each angular grid line.
    pub thetas: Vec<f64>,
}

/// Coefficients on the free DOFs; Dirichlet DOFs are implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    pub coeffs: Vec<f64>,
}

impl DiscreteField {
    pub fn zeros(space: &FeSpace) -> Self {
        DiscreteField { coeffs: vec![0.0; space.n_free] }
    }
}

/// Number the space over a mesh (the degree is the mesh's `p`).
pub fn build_space(mesh: &LayerMesh) -> FeSpace {
    let p = mesh.p;
    let m = mesh.m;
    let k = mesh.radial_bands();
    let n_r = k * p + 1;
    let n_t = m * p;
    let n_grid = n_r * n_t;
    let basis = NodalBasis1D::lobatto(p);

    let mut radii = vec![0.0; n_r];
    for bi in 0..k {
        let (r0, r1) = (mesh.breaks[bi], mesh.breaks[bi + 1]);
        for (j, &x) in basis.nodes.iter().enumerate() {
            // x = -1 lands exactly on r0 and +1 exactly on r1
            radii[bi * p + j] = r0 + 0.5 * (x + 1.0) * (r1 - r0);
        }
    }
    radii[n_r - 1] = mesh.geom.c;

    let tau = std::f64::consts::TAU;
    let mut thetas = vec![0.0; n_t];
    for s in 0..m {
        let (t0, t1) = (tau * s as f64 / m as f64, tau * (s + 1) as f64 / m as f64);
        for (j, &x) in basis.nodes.iter().enumerate().take(p) {
            thetas[s * p + j] = t0 + 0.5 * (x + 1.0) * (t1 - t0);
        }
    }

    let mut free_of_grid = vec![None; n_grid];
    let mut grid_of_free = Vec::with_capacity((n_r - 2) * n_t);
    for ir in 1..n_r - 1 {
        for it in 0..n_t {
            let g = ir * n_t + it;
            free_of_grid[g] = Some(grid_of_free.len());
            grid_of_free.push(g);
        }
    }
    let n_free = grid_of_free.len();

    FeSpace {
        p,
        m,
        n_bands: k,
        n_r,
        n_t,
        n_grid,
        n_free,
        basis,
        free_of_grid,
        grid_of_free,
        radii,
        thetas,
    }
}

impl FeSpace {
    /// Grid id of local node `(li, lj)` (radial, angular) of an element.
    pub fn local_to_grid(&self, band_index: usize, sector: usize, li: usize, lj: usize) -> usize {
        let ir = band_index * self.p + li;
        let it = (sector * self.p + lj) % self.n_t;
        ir * self.n_t + it
    }

    /// Grid ids of all `(p+1)²` element nodes, radial-major
    /// (`l = li·(p+1) + lj`).
    pub fn element_grid_ids(&self, elem: &Element) -> Vec<usize> {
        let mut ids = Vec::with_capacity((self.p + 1) * (self.p + 1));
        for li in 0..=self.p {
            for lj in 0..=self.p {
                ids.push(self.local_to_grid(elem.band_index, elem.sector, li, lj));
            }
        }
        ids
    }

    pub fn is_dirichlet(&self, grid: usize) -> bool {
        let ir = grid / self.n_t;
        ir == 0 || ir == self.n_r - 1
    }

    /// `(r, θ)` of a grid DOF.
    pub fn grid_coords(&self, grid: usize) -> (f64, f64) {
        (self.radii[grid / self.n_t], self.thetas[grid % self.n_t])
    }

    /// Field value at a grid DOF (zero on Dirichlet lines).
    pub fn value_at_grid(&self, field: &DiscreteField, grid: usize) -> f64 {
        self.free_of_grid[grid].map_or(0.0, |f| field.coeffs[f])
    }

    /// Local coefficient block of an element, radial-major.
    pub fn gather(&self, field: &DiscreteField, elem: &Element, out: &mut [f64]) {
        debug_assert_eq!(out.len(), (self.p + 1) * (self.p + 1));
        for li in 0..=self.p {
            for lj in 0..=self.p {
                let g = self.local_to_grid(elem.band_index, elem.sector, li, lj);
                out[li * (self.p + 1) + lj] = self.value_at_grid(field, g);
            }
        }
    }

    /// Value and reference-coordinate derivatives `(u, ∂u/∂ξ, ∂u/∂η)` at one
    /// point of an element.
    pub fn eval_ref(&self, field: &DiscreteField, elem: &Element, xi: f64, eta: f64) -> (f64, f64, f64) {
        let n = self.p + 1;
        let mut local = vec![0.0; n * n];
        self.gather(field, elem, &mut local);
        let mut vr = vec![0.0; n];
        let mut dr = vec![0.0; n];
        let mut vt = vec![0.0; n];
        let mut dt = vec![0.0; n];
        self.basis.values_derivs_into(xi, &mut vr, &mut dr);
        self.basis.values_derivs_into(eta, &mut vt, &mut dt);
        let (mut u, mut uxi, mut ueta) = (0.0, 0.0, 0.0);
        for li in 0..n {
            for lj in 0..n {
                let c = local[li * n + lj];
                u += c * vr[li] * vt[lj];
                uxi += c * dr[li] * vt[lj];
                ueta += c * vr[li] * dt[lj];
            }
        }
        (u, uxi, ueta)
    }

    pub fn eval(&self, field: &DiscreteField, elem: &Element, xi: f64, eta: f64) -> f64 {
        self.eval_ref(field, elem, xi, eta).0
    }

    /// Value and Cartesian gradient via the inverse polar Jacobian.
    pub fn eval_grad(&self, field: &DiscreteField, elem: &Element, xi: f64, eta: f64) -> (f64, [f64; 2]) {
        let (u, uxi, ueta) = self.eval_ref(field, elem, xi, eta);
        let (r, t) = elem.polar(xi, eta);
        let ur = uxi * 2.0 / elem.dr();
        let ut = ueta * 2.0 / elem.dt();
        let (ct, st) = (t.cos(), t.sin());
        (u, [ur * ct - ut / r * st, ur * st + ut / r * ct])
    }

    /// Interpolate `f(r, θ)` at the free nodes (Dirichlet nodes stay zero).
    pub fn interpolate(&self, mut f: impl FnMut(f64, f64) -> f64) -> DiscreteField {
        let mut coeffs = vec![0.0; self.n_free];
        for (fi, &g) in self.grid_of_free.iter().enumerate() {
            let (r, t) = self.grid_coords(g);
            coeffs[fi] = f(r, t);
        }
        DiscreteField { coeffs }
    }
}
