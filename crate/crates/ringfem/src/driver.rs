//! End-to-end pipeline for one parameter point: problem → mesh → space →
//! assemble/solve → error norms against the closed-form solution.

use std::time::Instant;

use crate::assembly::{assemble, solve_spd};
use crate::geometry::AnnularGeometry;
use crate::mesh::{build_mesh, fmt_float, LayerMesh};
use crate::oracle::ExactSolution;
use crate::postproc::{error_norms, exact_energy_norm, SweepRecord};
use crate::problem::{DataCase, TransmissionProblem};
use crate::space::{build_space, DiscreteField, FeSpace};
use crate::Result;

/// Everything that pins down one solve.
#[derive(Debug, Clone, Copy)]
pub struct RunParams {
    pub geom: AnnularGeometry,
    pub eps: f64,
    pub p: usize,
    pub kappa: f64,
    pub m: usize,
    pub case: DataCase,
    pub h_sign: f64,
    /// Assembly quadrature order; `None` → `p + 2`.
    pub quad_order: Option<usize>,
    /// Error-norm quadrature order; `None` → `p + 5`.
    pub error_quad: Option<usize>,
}

impl RunParams {
    pub fn new(geom: AnnularGeometry, eps: f64, p: usize) -> Self {
        RunParams {
            geom,
            eps,
            p,
            kappa: 1.0,
            m: 16,
            case: DataCase::Const,
            h_sign: 1.0,
            quad_order: None,
            error_quad: None,
        }
    }
}

/// The artifacts of one solve, kept alive for further probing.
#[derive(Debug)]
pub struct RunOutput {
    pub record: SweepRecord,
    pub problem: TransmissionProblem,
    pub mesh: LayerMesh,
    pub space: FeSpace,
    pub field: DiscreteField,
    pub exact: ExactSolution,
    /// `‖u‖_ε` from the independent 1-D route (the relative-error normalizer).
    pub exact_norm: f64,
}

pub fn solve_case(params: &RunParams) -> Result<RunOutput> {
    let problem = TransmissionProblem::new(params.geom, params.eps, params.case)?
        .with_h_sign(params.h_sign);
    let mesh = build_mesh(&params.geom, params.eps, params.p, params.kappa, params.m)?;
    let space = build_space(&mesh);
    let quad = params.quad_order.unwrap_or(params.p + 2);

    let clock = Instant::now();
    let system = assemble(&space, &mesh, &problem, quad)?;
    let coeffs = solve_spd(&system)?;
    let runtime_ms = clock.elapsed().as_secs_f64() * 1e3;

    let field = DiscreteField { coeffs };
    let exact = ExactSolution::for_problem(&problem)?;
    let err_quad = params.error_quad.unwrap_or(params.p + 5);
    let err = error_norms(&space, &mesh, &problem, &field, &exact, err_quad)?;
    let exact_norm = exact_energy_norm(&problem, &exact);
    let record = SweepRecord {
        eps: params.eps,
        p: params.p,
        n: space.n_free,
        err_energy_abs: err.energy,
        err_energy_rel: if exact_norm > 0.0 { err.energy / exact_norm } else { err.energy },
        err_l2: err.l2,
        runtime_ms,
    };
    Ok(RunOutput { record, problem, mesh, space, field, exact, exact_norm })
}

/// Nodal dump of the discrete solution as JSON: the polar grid lines and the
/// solution value at every grid node (boundary rows included as zeros),
/// row-major over `(radius, angle)`.
pub fn solution_json(out: &RunOutput) -> String {
    let space = &out.space;
    let mut s = String::from("{\n  \"radii\": [");
    for (i, r) in space.radii.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&fmt_float(*r));
    }
    s.push_str("],\n  \"thetas\": [");
    for (i, t) in space.thetas.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&fmt_float(*t));
    }
    s.push_str("],\n  \"values\": [");
    for g in 0..space.n_grid {
        if g > 0 {
            s.push_str(", ");
        }
        s.push_str(&fmt_float(space.value_at_grid(&out.field, g)));
    }
    s.push_str("]\n}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> AnnularGeometry {
        AnnularGeometry::new(1.0, 2.0, 3.0).unwrap()
    }

    #[test]
    fn manufactured_solution_is_reproduced_to_roundoff() {
        // the polynomial solution lies in the trial space for p ≥ 2, so the
        // discrete solution matches it to solver precision
        for &eps in &[1.0, 0.01] {
            let mut params = RunParams::new(geom(), eps, 3);
            params.case = DataCase::Manufactured;
            params.m = 8;
            let out = solve_case(&params).unwrap();
            assert!(
                out.record.err_energy_rel <= 1e-8,
                "eps {eps:e}: relative energy error {:e}",
                out.record.err_energy_rel
            );
            assert!(out.record.err_l2 <= 1e-8 * out.exact_norm);
        }
    }

    #[test]
    fn benchmark_energy_error_decreases_with_degree() {
        let mut last = f64::INFINITY;
        for p in [1, 2, 3, 4] {
            let mut params = RunParams::new(geom(), 1e-2, p);
            params.m = 8;
            let out = solve_case(&params).unwrap();
            assert_eq!(out.record.n, (out.mesh.radial_bands() * p - 1) * 8 * p);
            assert!(
                out.record.err_energy_rel < last,
                "p = {p}: {} !< {last}",
                out.record.err_energy_rel
            );
            last = out.record.err_energy_rel;
        }
        assert!(last < 5e-2, "p = 4 error {last}");
    }

    #[test]
    fn pointwise_values_match_the_oracle() {
        let mut params = RunParams::new(geom(), 1e-2, 6);
        params.m = 8;
        let out = solve_case(&params).unwrap();
        // interior probe radii, compared against frozen connection values
        for &(r, want) in &[(2.0, 0.32675289906455344252), (2.5, 0.24377060646259299416)] {
            let elem = out
                .mesh
                .elements
                .iter()
                .find(|e| e.r0 <= r && r <= e.r1 && e.t0 == 0.0)
                .unwrap();
            let xi = 2.0 * (r - elem.r0) / (elem.r1 - elem.r0) - 1.0;
            let got = out.space.eval(&out.field, elem, xi, -1.0);
            assert!(
                (got - want).abs() < 1e-4,
                "u({r}) = {got} vs {want}"
            );
        }
    }

    #[test]
    fn solution_json_has_grid_shape() {
        let mut params = RunParams::new(geom(), 0.5, 2);
        params.m = 4;
        let out = solve_case(&params).unwrap();
        let json = solution_json(&out);
        assert_eq!(json.matches('[').count(), 3);
        let values: Vec<&str> = json
            .split("\"values\": [")
            .nth(1)
            .unwrap()
            .split(']')
            .next()
            .unwrap()
            .split(", ")
            .collect();
        assert_eq!(values.len(), out.space.n_grid);
        // inner boundary row is pinned to zero
        assert!(values[0].starts_with("0."));
    }

    #[test]
    fn invalid_parameters_surface_as_config_errors() {
        let params = RunParams::new(geom(), 0.0, 3);
        assert!(solve_case(&params).is_err());
        let mut params = RunParams::new(geom(), 0.1, 3);
        params.m = 2;
        let err = solve_case(&params).unwrap_err();
        assert!(err.is_config());
    }
}
