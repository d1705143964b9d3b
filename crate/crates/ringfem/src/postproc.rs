//! Error norms against the exact solution, the independent 1-D norm oracle,
//! and the exponential-rate fit.
//!
//! Error integrands on inner-ring elements carry `e^{-dist/ε}` tails that a
//! fixed-order Gauss rule cannot see when ε is far below the element width,
//! so every radial integral here is split into layer-graded panels with
//! geometric breakpoints `a + ε·2^k` and `b - ε·2^k` before applying the
//! rule.  The relative-error normalizer `‖u‖_ε` is computed by a separate
//! 1-D radial quadrature of the oracle, deliberately not by the FEM-mesh
//! route, so the two error factors stay independent.

use crate::geometry::Region;
use crate::mesh::{fmt_float, LayerMesh};
use crate::oracle::ExactSolution;
use crate::problem::TransmissionProblem;
use crate::quadrature::gauss_legendre;
use crate::space::{DiscreteField, FeSpace};
use crate::{Error, Result};

/// Energy- and L²-norm values of one integrand.
#[derive(Debug, Clone, Copy)]
pub struct ErrorNorms {
    pub energy: f64,
    pub l2: f64,
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub eps: f64,
    pub p: usize,
    pub n: usize,
    pub err_energy_abs: f64,
    pub err_energy_rel: f64,
    pub err_l2: f64,
    pub runtime_ms: f64,
}

/// Geometric breakpoints resolving the `ε`-scale layers of the inner ring,
/// clipped to `(r0, r1)`.
fn graded_cuts(r0: f64, r1: f64, eps: f64, a: f64, b: f64, region: Region) -> Vec<f64> {
    let mut cuts = vec![r0, r1];
    if region == Region::Plus {
        let span = b - a;
        let mut d = eps;
        while d < span {
            let from_a = a + d;
            if from_a > r0 && from_a < r1 {
                cuts.push(from_a);
            }
            let from_b = b - d;
            if from_b > r0 && from_b < r1 {
                cuts.push(from_b);
            }
            d *= 2.0;
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-13 * (1.0 + y.abs()));
    cuts
}

/// Shared panel-quadrature core: integrates the energy and L² densities of
/// `field - exact` over the mesh (either side optional).
fn diff_norms(
    space: &FeSpace,
    mesh: &LayerMesh,
    problem: &TransmissionProblem,
    field: Option<&DiscreteField>,
    exact: Option<&dyn Fn(f64, Region) -> (f64, f64)>,
    quad_order: usize,
) -> Result<ErrorNorms> {
    if quad_order < space.p + 3 {
        return Err(Error::Config(format!(
            "error-quadrature order {quad_order} below the minimum p+3 = {}",
            space.p + 3
        )));
    }
    let n = space.p + 1;
    let rule = gauss_legendre(quad_order);
    let nq = rule.len();

    // angular tables are element-independent
    let mut vt = vec![0.0; nq * n];
    let mut dt = vec![0.0; nq * n];
    for (q, &x) in rule.nodes.iter().enumerate() {
        space.basis.values_derivs_into(x, &mut vt[q * n..(q + 1) * n], &mut dt[q * n..(q + 1) * n]);
    }

    let mut local = vec![0.0; n * n];
    let mut vr = vec![0.0; n];
    let mut dr = vec![0.0; n];
    let mut row_v = vec![0.0; n];
    let mut row_d = vec![0.0; n];
    let (mut energy2, mut l22) = (0.0, 0.0);

    for elem in &mesh.elements {
        if let Some(f) = field {
            space.gather(f, elem, &mut local);
        }
        let w = problem.weight(elem.region);
        let (hr, ht) = (0.5 * elem.dr(), 0.5 * elem.dt());
        let cuts = graded_cuts(elem.r0, elem.r1, problem.eps, mesh.geom.a, mesh.geom.b, elem.region);
        for panel in cuts.windows(2) {
            // panel in reference radial coordinates
            let x0 = (panel[0] - elem.r0) / hr - 1.0;
            let x1 = (panel[1] - elem.r0) / hr - 1.0;
            let (pm, ph) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
            for qi in 0..nq {
                let xi = pm + ph * rule.nodes[qi];
                let r = elem.r0 + (xi + 1.0) * hr;
                let wr = rule.weights[qi] * ph;
                let (mut ue, mut due) = (0.0, 0.0);
                if let Some(ex) = exact {
                    let v = ex(r, elem.region);
                    ue = v.0;
                    due = v.1;
                }
                if field.is_some() {
                    space.basis.values_derivs_into(xi, &mut vr, &mut dr);
                    for lj in 0..n {
                        let (mut sv, mut sd) = (0.0, 0.0);
                        for li in 0..n {
                            sv += local[li * n + lj] * vr[li];
                            sd += local[li * n + lj] * dr[li];
                        }
                        row_v[lj] = sv;
                        row_d[lj] = sd;
                    }
                } else {
                    row_v.fill(0.0);
                    row_d.fill(0.0);
                }
                let det = r * hr * ht;
                for qj in 0..nq {
                    let (mut u, mut uxi, mut ueta) = (0.0, 0.0, 0.0);
                    if field.is_some() {
                        let vtq = &vt[qj * n..(qj + 1) * n];
                        let dtq = &dt[qj * n..(qj + 1) * n];
                        for lj in 0..n {
                            u += row_v[lj] * vtq[lj];
                            uxi += row_d[lj] * vtq[lj];
                            ueta += row_v[lj] * dtq[lj];
                        }
                    }
                    let e = u - ue;
                    let er = uxi / hr - due;
                    let et = ueta / ht / r;
                    let wq = wr * rule.weights[qj] * det;
                    energy2 += wq * (w * (er * er + et * et) + e * e);
                    l22 += wq * e * e;
                }
            }
        }
    }
    Ok(ErrorNorms { energy: energy2.sqrt(), l2: l22.sqrt() })
}

/// `‖u - u_N‖` in the energy and L² norms over the FEM mesh.
pub fn error_norms(
    space: &FeSpace,
    mesh: &LayerMesh,
    problem: &TransmissionProblem,
    field: &DiscreteField,
    exact: &ExactSolution,
    quad_order: usize,
) -> Result<ErrorNorms> {
    let ex = |r: f64, reg: Region| exact.eval_in(r, reg);
    diff_norms(space, mesh, problem, Some(field), Some(&ex), quad_order)
}

/// Norms of a discrete field alone.
pub fn field_norms(
    space: &FeSpace,
    mesh: &LayerMesh,
    problem: &TransmissionProblem,
    field: &DiscreteField,
    quad_order: usize,
) -> Result<ErrorNorms> {
    diff_norms(space, mesh, problem, Some(field), None, quad_order)
}

/// The bilinear form `B_ε(u - u_N, v)` for a discrete test field `v`,
/// integrated with the same layer-graded panels (the computable face of
/// Galerkin orthogonality).
pub fn b_residual(
    space: &FeSpace,
    mesh: &LayerMesh,
    problem: &TransmissionProblem,
    field: &DiscreteField,
    exact: &ExactSolution,
    test: &DiscreteField,
    quad_order: usize,
) -> f64 {
    let n = space.p + 1;
    let rule = gauss_legendre(quad_order);
    let nq = rule.len();
    let mut vt = vec![0.0; nq * n];
    let mut dt = vec![0.0; nq * n];
    for (q, &x) in rule.nodes.iter().enumerate() {
        space.basis.values_derivs_into(x, &mut vt[q * n..(q + 1) * n], &mut dt[q * n..(q + 1) * n]);
    }
    let mut lu = vec![0.0; n * n];
    let mut lv = vec![0.0; n * n];
    let mut vr = vec![0.0; n];
    let mut dr = vec![0.0; n];
    let mut acc = 0.0;
    for elem in &mesh.elements {
        space.gather(field, elem, &mut lu);
        space.gather(test, elem, &mut lv);
        let w = problem.weight(elem.region);
        let (hr, ht) = (0.5 * elem.dr(), 0.5 * elem.dt());
        let cuts = graded_cuts(elem.r0, elem.r1, problem.eps, mesh.geom.a, mesh.geom.b, elem.region);
        for panel in cuts.windows(2) {
            let x0 = (panel[0] - elem.r0) / hr - 1.0;
            let x1 = (panel[1] - elem.r0) / hr - 1.0;
            let (pm, ph) = (0.5 * (x0 + x1), 0.5 * (x1 - x0));
            for qi in 0..nq {
                let xi = pm + ph * rule.nodes[qi];
                let r = elem.r0 + (xi + 1.0) * hr;
                let wr = rule.weights[qi] * ph;
                let (ue, due) = exact.eval_in(r, elem.region);
                space.basis.values_derivs_into(xi, &mut vr, &mut dr);
                let det = r * hr * ht;
                for qj in 0..nq {
                    let vtq = &vt[qj * n..(qj + 1) * n];
                    let dtq = &dt[qj * n..(qj + 1) * n];
                    let (mut u, mut uxi, mut ueta) = (0.0, 0.0, 0.0);
                    let (mut v, mut vxi, mut veta) = (0.0, 0.0, 0.0);
                    for lj in 0..n {
                        let (mut suv, mut sud, mut svv, mut svd) = (0.0, 0.0, 0.0, 0.0);
                        for li in 0..n {
                            suv += lu[li * n + lj] * vr[li];
                            sud += lu[li * n + lj] * dr[li];
                            svv += lv[li * n + lj] * vr[li];
                            svd += lv[li * n + lj] * dr[li];
                        }
                        u += suv * vtq[lj];
                        uxi += sud * vtq[lj];
                        ueta += suv * dtq[lj];
                        v += svv * vtq[lj];
                        vxi += svd * vtq[lj];
                        veta += svv * dtq[lj];
                    }
                    let e = ue - u;
                    let er = due - uxi / hr;
                    let et = -ueta / ht / r;
                    let tr = vxi / hr;
                    let tt = veta / ht / r;
                    let wq = wr * rule.weights[qj] * det;
                    acc += wq * (w * (er * tr + et * tt) + e * v);
                }
            }
        }
    }
    acc
}

/// `‖u‖_ε` of the exact solution by independent 1-D radial quadrature
/// (`2π ∫ (w u'² + u²) r dr` with layer-graded panels).
pub fn exact_energy_norm(problem: &TransmissionProblem, exact: &ExactSolution) -> f64 {
    exact_norms(problem, exact).energy
}

/// Energy and L² norms of the exact solution, 1-D route.
pub fn exact_norms(problem: &TransmissionProblem, exact: &ExactSolution) -> ErrorNorms {
    let g = &problem.geom;
    let rule = gauss_legendre(24);
    let (mut energy2, mut l22) = (0.0, 0.0);
    for &region in &[Region::Plus, Region::Minus] {
        let (lo, hi) = g.radial_span(region);
        let w = problem.weight(region);
        let mut cuts = graded_cuts(lo, hi, problem.eps, g.a, g.b, region);
        if region == Region::Minus {
            // smooth side: a fixed three-way split is ample for the rule
            cuts = vec![lo, lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0, hi];
        }
        for panel in cuts.windows(2) {
            energy2 += rule.integrate(panel[0], panel[1], |r| {
                let (u, du) = exact.eval_in(r, region);
                (w * du * du + u * u) * r
            });
            l22 += rule.integrate(panel[0], panel[1], |r| {
                let (u, _) = exact.eval_in(r, region);
                u * u * r
            });
        }
    }
    let tau = std::f64::consts::TAU;
    ErrorNorms { energy: (tau * energy2).sqrt(), l2: (tau * l22).sqrt() }
}

/// Least-squares fit of the exponential convergence model
/// `err ≈ C · N² e^{-b√N}`, plus the plain semilog slope of `ln err` in `p`.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub b: f64,
    pub c: f64,
    /// Coefficient of determination of the `ln err - 2 ln N` vs `√N` fit.
    pub r_squared: f64,
    /// Slope of `ln err` against `p` (for semilog-in-p comparisons).
    pub p_slope: f64,
}

pub fn fit_rate(records: &[SweepRecord]) -> Result<RateFit> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::Config(format!(
            "rate fit needs at least 3 records with distinct N, got {}",
            ns.len()
        )));
    }
    if records.iter().any(|r| !(r.err_energy_rel > 0.0)) {
        return Err(Error::Config("rate fit needs strictly positive errors".into()));
    }
    // y = ln C - b s with s = √N, y = ln err - 2 ln N
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| ((r.n as f64).sqrt(), r.err_energy_rel.ln() - 2.0 * (r.n as f64).ln()))
        .collect();
    let (slope, intercept, r2) = linear_fit(&pts);
    let ppts: Vec<(f64, f64)> =
        records.iter().map(|r| (r.p as f64, r.err_energy_rel.ln())).collect();
    let (p_slope, _, _) = linear_fit(&ppts);
    Ok(RateFit { b: -slope, c: intercept.exp(), r_squared: r2, p_slope })
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let d = p.1 - (intercept + slope * p.0);
            d * d
        })
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

/// CSV with the exact header `eps,p,N,err_energy_abs,err_energy_rel,err_l2,runtime_ms`,
/// rows sorted by `(eps, p)`, floats at 17 significant digits.
pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut rows = records.to_vec();
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.p.cmp(&b.p)));
    let mut out = String::from("eps,p,N,err_energy_abs,err_energy_rel,err_l2,runtime_ms\n");
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_float(r.eps),
            r.p,
            r.n,
            fmt_float(r.err_energy_abs),
            fmt_float(r.err_energy_rel),
            fmt_float(r.err_l2),
            fmt_float(r.runtime_ms)
        ));
    }
    out
}

/// Appended-comment summary of one per-ε fit.
pub fn fit_summary_line(eps: f64, fit: &RateFit) -> String {
    format!(
        "# fit eps={}: b={}, C={}, R2={}, p_slope={}\n",
        fmt_float(eps),
        fmt_float(fit.b),
        fmt_float(fit.c),
        fmt_float(fit.r_squared),
        fmt_float(fit.p_slope)
    )
}

/// JSON mirror of the CSV schema (same field names) plus the fits.
pub fn records_to_json(records: &[SweepRecord], fits: &[(f64, RateFit)]) -> String {
    let mut rows = records.to_vec();
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.p.cmp(&b.p)));
    let mut out = String::from("{\n  \"records\": [\n");
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&format!(
            "    {{\"eps\": {}, \"p\": {}, \"N\": {}, \"err_energy_abs\": {}, \"err_energy_rel\": {}, \"err_l2\": {}, \"runtime_ms\": {}}}{}\n",
            fmt_float(r.eps),
            r.p,
            r.n,
            fmt_float(r.err_energy_abs),
            fmt_float(r.err_energy_rel),
            fmt_float(r.err_l2),
            fmt_float(r.runtime_ms),
            if i + 1 < rows.len() { "," } else { "" }
        ));
    }
    out.push_str("  ],\n  \"fits\": [\n");
    for (i, (eps, f)) in fits.iter().enumerate() {
        out.push_str(&format!(
            "    {{\"eps\": {}, \"b\": {}, \"C\": {}, \"r_squared\": {}, \"p_slope\": {}}}{}\n",
            fmt_float(*eps),
            fmt_float(f.b),
            fmt_float(f.c),
            fmt_float(f.r_squared),
            fmt_float(f.p_slope),
            if i + 1 < fits.len() { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}
