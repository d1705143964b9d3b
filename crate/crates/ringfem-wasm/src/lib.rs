//! Browser bindings for the annulus transmission solver.
//!
//! Three operations back the demo page: a mesh dump for drawing the
//! layer-adapted element layout, a radial solution profile comparing the
//! discrete and closed-form solutions, and a p-convergence sweep.  Each
//! returns a JSON string; the `wasm-bindgen` wrappers are gated on the
//! `wasm32` target so the crate builds and tests natively.
//!
//! Build the browser artifact with
//! `wasm-pack build crates/ringfem-wasm --target web --release`
//! and serve `www/` next to the generated `pkg/`.

use ringfem::prelude::*;
// the prelude's `Result` is the library's single-parameter alias; this module
// wants the plain two-parameter form with `String` errors
use std::result::Result;

const MAX_DEGREE: usize = 12;
const MAX_SECTORS: usize = 128;

fn geometry(a: f64, b: f64, c: f64) -> Result<AnnularGeometry, String> {
    AnnularGeometry::new(a, b, c).map_err(|e| e.to_string())
}

fn check_degree(p: usize) -> Result<(), String> {
    if p == 0 || p > MAX_DEGREE {
        return Err(format!("polynomial degree must lie in 1..={MAX_DEGREE}, got {p}"));
    }
    Ok(())
}

fn check_sectors(m: usize) -> Result<(), String> {
    if !(4..=MAX_SECTORS).contains(&m) {
        return Err(format!("sector count must lie in 4..={MAX_SECTORS}, got {m}"));
    }
    Ok(())
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_array(xs: &[f64]) -> String {
    let body: Vec<String> = xs.iter().map(|&x| fmt(x)).collect();
    format!("[{}]", body.join(", "))
}

/// Layer-adapted mesh as JSON (regime, needle widths, element rectangles in
/// polar coordinates) for the mesh panel.
pub fn mesh_json_impl(
    a: f64,
    b: f64,
    c: f64,
    eps: f64,
    p: usize,
    kappa: f64,
    m: usize,
) -> Result<String, String> {
    check_degree(p)?;
    check_sectors(m)?;
    let geom = geometry(a, b, c)?;
    let mesh = build_mesh(&geom, eps, p, kappa, m).map_err(|e| e.to_string())?;
    Ok(mesh.to_json())
}

/// Radial sample set that resolves `e^{-dist/eps}` layers: a uniform base
/// grid plus geometric clusters hugging `r = a` and the inside of `r = b`.
fn profile_radii(geom: &AnnularGeometry, eps: f64, base: usize) -> Vec<f64> {
    let (a, b, c) = (geom.a, geom.b, geom.c);
    let mut rs: Vec<f64> = (0..=base)
        .map(|k| a + (c - a) * k as f64 / base as f64)
        .collect();
    let cluster = 60;
    for k in 0..cluster {
        // depths from 1e-2·eps out to 12·eps, geometrically spaced
        let d = eps * 1e-2 * (1200.0f64).powf(k as f64 / (cluster - 1) as f64);
        if a + d < b {
            rs.push(a + d);
        }
        if b - d > a {
            rs.push(b - d);
        }
    }
    rs.push(b);
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs
}

/// Solve one case and tabulate discrete vs. exact solution along the ray
/// `θ = 0`, plus the error record, as JSON for the profile panel.
pub fn solve_profile_impl(
    a: f64,
    b: f64,
    c: f64,
    eps: f64,
    p: usize,
    m: usize,
) -> Result<String, String> {
    check_degree(p)?;
    check_sectors(m)?;
    let geom = geometry(a, b, c)?;
    let params = {
        let mut pr = RunParams::new(geom, eps, p);
        pr.m = m;
        pr
    };
    let out = solve_case(&params).map_err(|e| e.to_string())?;

    let rs = profile_radii(&geom, eps, 240);
    let mut uh = Vec::with_capacity(rs.len());
    let mut ue = Vec::with_capacity(rs.len());
    for &r in &rs {
        let elem = out
            .mesh
            .elements
            .iter()
            .find(|e| e.t0 == 0.0 && e.r0 <= r && r <= e.r1)
            .ok_or_else(|| format!("no element covers r = {r}"))?;
        let xi = 2.0 * (r - elem.r0) / (elem.r1 - elem.r0) - 1.0;
        uh.push(out.space.eval(&out.field, elem, xi.clamp(-1.0, 1.0), -1.0));
        ue.push(out.exact.eval_in(r, elem.region).0);
    }
    let rec = &out.record;
    Ok(format!(
        "{{\n  \"r\": {},\n  \"u_h\": {},\n  \"u\": {},\n  \"n_dof\": {},\n  \
         \"err_energy_rel\": {},\n  \"err_l2\": {},\n  \"runtime_ms\": {},\n  \
         \"w_bl\": {},\n  \"w_il\": {},\n  \"regime\": \"{}\"\n}}\n",
        json_array(&rs),
        json_array(&uh),
        json_array(&ue),
        rec.n,
        fmt(rec.err_energy_rel),
        fmt(rec.err_l2),
        fmt(rec.runtime_ms),
        fmt(out.mesh.w_bl),
        fmt(out.mesh.w_il),
        match out.mesh.regime {
            Regime::Asymptotic => "asymptotic",
            Regime::Preasymptotic => "preasymptotic",
        },
    ))
}

/// Convergence sweep `p = 1..=p_max` at fixed ε: records plus the fitted
/// exponential rate, as JSON for the convergence panel.
pub fn convergence_impl(
    a: f64,
    b: f64,
    c: f64,
    eps: f64,
    p_max: usize,
    m: usize,
) -> Result<String, String> {
    check_degree(p_max)?;
    check_sectors(m)?;
    let geom = geometry(a, b, c)?;
    let mut records = Vec::new();
    for p in 1..=p_max {
        let mut params = RunParams::new(geom, eps, p);
        params.m = m;
        records.push(solve_case(&params).map_err(|e| e.to_string())?.record);
    }
    let fits = match fit_rate(&records) {
        Ok(f) => vec![(eps, f)],
        Err(_) => Vec::new(),
    };
    Ok(records_to_json(&records, &fits))
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    fn to_js(r: Result<String, String>) -> Result<String, JsValue> {
        r.map_err(|e| JsValue::from_str(&e))
    }

    /// Layer-adapted mesh layout as a JSON string.
    #[wasm_bindgen]
    pub fn mesh_json(
        a: f64,
        b: f64,
        c: f64,
        eps: f64,
        p: usize,
        kappa: f64,
        m: usize,
    ) -> Result<String, JsValue> {
        to_js(super::mesh_json_impl(a, b, c, eps, p, kappa, m))
    }

    /// Discrete vs. exact radial profile as a JSON string.
    #[wasm_bindgen]
    pub fn solve_profile(
        a: f64,
        b: f64,
        c: f64,
        eps: f64,
        p: usize,
        m: usize,
    ) -> Result<String, JsValue> {
        to_js(super::solve_profile_impl(a, b, c, eps, p, m))
    }

    /// p-convergence records and rate fit as a JSON string.
    #[wasm_bindgen]
    pub fn convergence(
        a: f64,
        b: f64,
        c: f64,
        eps: f64,
        p_max: usize,
        m: usize,
    ) -> Result<String, JsValue> {
        to_js(super::convergence_impl(a, b, c, eps, p_max, m))
    }
}
