//! Assembly of the weighted stiffness-mass system and the direct solve.
//!
//! The geometry and both built-in data cases are radial, so every element
//! integral factorizes into 1-D radial × angular pieces:
//!
//! ```text
//!   A_e = w·(Sr ⊗ Mt + Cr ⊗ St) + Mr ⊗ Mt
//! ```
//!
//! with `Sr, Mr` the r-weighted radial stiffness/mass factors, `Cr` the
//! `1/r`-weighted radial mass (from `|∇u|² = u_r² + (u_θ/r)²`), and
//! `St, Mt` the reference angular factors; `w = ε²` on the inner ring.  The
//! interface load `∫_Σ h v ds` is assembled from the outer-ring trace of the
//! elements touching `r = b`.
//!
//! The solve is profile LDLᵀ after Jacobi equilibration, followed by up to
//! two iterative-refinement passes; the residual contract
//! `‖Ax-b‖/‖b‖ ≤ 1e-10` is enforced, not assumed.

use crate::geometry::Region;
use crate::mesh::{Element, LayerMesh};
use crate::problem::TransmissionProblem;
use crate::quadrature::gauss_legendre;
use crate::skyline::Profile;
use crate::space::FeSpace;
use crate::{Error, Result};

/// The reduced (free-DOF) system.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub n: usize,
    pub matrix: Profile,
    pub rhs: Vec<f64>,
}

/// Per-element matrix and load, dense over the `(p+1)²` local nodes
/// (radial-major).  `grad_scale` / `mass_scale` exist for structural
/// diagnostics; the real operator uses `1, 1`.
pub(crate) fn element_system(
    space: &FeSpace,
    elem: &Element,
    problem: &TransmissionProblem,
    quad_order: usize,
    grad_scale: f64,
    mass_scale: f64,
) -> (Vec<f64>, Vec<f64>) {
    let p = space.p;
    let n = p + 1;
    let rule = gauss_legendre(quad_order);
    let nq = rule.len();

    // 1-D basis tables at the quadrature nodes
    let mut val = vec![0.0; nq * n];
    let mut der = vec![0.0; nq * n];
    for (q, &x) in rule.nodes.iter().enumerate() {
        let (v, d) = (&mut val[q * n..(q + 1) * n], &mut der[q * n..(q + 1) * n]);
        // split borrows: values and derivatives at one node
        space.basis.values_derivs_into(x, v, d);
    }

    let (hr, ht) = (0.5 * elem.dr(), 0.5 * elem.dt());
    let w = problem.weight(elem.region);

    // radial factors (carry the r-weight of the polar Jacobian) and load
    let mut mr = vec![0.0; n * n];
    let mut sr = vec![0.0; n * n];
    let mut cr = vec![0.0; n * n];
    let mut fr = vec![0.0; n];
    for q in 0..nq {
        let r = elem.r0 + (rule.nodes[q] + 1.0) * hr;
        let wq = rule.weights[q];
        let vm = &val[q * n..(q + 1) * n];
        let dm = &der[q * n..(q + 1) * n];
        let c_m = wq * r * hr; // mass: ∫ φφ r dr
        let c_s = wq * r / hr; // stiffness: (2/Δr)² scaled by r·(Δr/2)
        let c_c = wq * hr / r; // angular-gradient factor: ∫ φφ / r dr
        let f = problem.f_at(r, elem.region);
        for li in 0..n {
            fr[li] += wq * vm[li] * f * r * hr;
            for mi in li..n {
                mr[li * n + mi] += c_m * vm[li] * vm[mi];
                sr[li * n + mi] += c_s * dm[li] * dm[mi];
                cr[li * n + mi] += c_c * vm[li] * vm[mi];
            }
        }
    }
    for li in 0..n {
        for mi in 0..li {
            mr[li * n + mi] = mr[mi * n + li];
            sr[li * n + mi] = sr[mi * n + li];
            cr[li * n + mi] = cr[mi * n + li];
        }
    }

    // angular factors on the reference sector
    let mut mt = vec![0.0; n * n];
    let mut st = vec![0.0; n * n];
    let mut ft = vec![0.0; n];
    for q in 0..nq {
        let wq = rule.weights[q];
        let vm = &val[q * n..(q + 1) * n];
        let dm = &der[q * n..(q + 1) * n];
        for lj in 0..n {
            ft[lj] += wq * vm[lj] * ht;
            for mj in 0..n {
                mt[lj * n + mj] += wq * ht * vm[lj] * vm[mj];
                st[lj * n + mj] += wq / ht * dm[lj] * dm[mj];
            }
        }
    }

    let nn = n * n;
    let mut emat = vec![0.0; nn * nn];
    let mut eload = vec![0.0; nn];
    for li in 0..n {
        for lj in 0..n {
            let row = li * n + lj;
            eload[row] = fr[li] * ft[lj];
            for mi in 0..n {
                for mj in 0..n {
                    let col = mi * n + mj;
                    emat[row * nn + col] = grad_scale
                        * w
                        * (sr[li * n + mi] * mt[lj * n + mj] + cr[li * n + mi] * st[lj * n + mj])
                        + mass_scale * mr[li * n + mi] * mt[lj * n + mj];
                }
            }
        }
    }
    (emat, eload)
}

/// Angular trace load `h_sign · h · b · ∫ φ_lj dθ` over one interface edge.
fn interface_load(space: &FeSpace, elem: &Element, problem: &TransmissionProblem, quad_order: usize) -> Vec<f64> {
    let n = space.p + 1;
    let rule = gauss_legendre(quad_order);
    let ht = 0.5 * elem.dt();
    let h = problem.h_sign * problem.h_datum() * problem.geom.b;
    let mut out = vec![0.0; n];
    let mut vals = vec![0.0; n];
    for (q, &x) in rule.nodes.iter().enumerate() {
        space.basis.values_into(x, &mut vals);
        for (lj, &v) in vals.iter().enumerate() {
            out[lj] += rule.weights[q] * ht * h * v;
        }
    }
    out
}

/// Assemble the free-DOF system.
pub fn assemble(
    space: &FeSpace,
    mesh: &LayerMesh,
    problem: &TransmissionProblem,
    quad_order: usize,
) -> Result<SparseSystem> {
    if quad_order < space.p + 1 {
        return Err(Error::Config(format!(
            "quadrature order {quad_order} below the minimum p+1 = {}",
            space.p + 1
        )));
    }
    let n_free = space.n_free;

    // row profile: lowest coupled free id per row
    let mut first: Vec<usize> = (0..n_free).collect();
    let mut elem_free: Vec<Vec<Option<usize>>> = Vec::with_capacity(mesh.elements.len());
    for elem in &mesh.elements {
        let ids = space.element_grid_ids(elem);
        let free: Vec<Option<usize>> = ids.iter().map(|&g| space.free_of_grid[g]).collect();
        if let Some(lo) = free.iter().flatten().min().copied() {
            for &f in free.iter().flatten() {
                if first[f] > lo {
                    first[f] = lo;
                }
            }
        }
        elem_free.push(free);
    }
    let mut matrix = Profile::new(first);
    let mut rhs = vec![0.0; n_free];

    let interface_band = mesh.interface_break();
    for (e, elem) in mesh.elements.iter().enumerate() {
        let (emat, eload) = element_system(space, elem, problem, quad_order, 1.0, 1.0);
        let free = &elem_free[e];
        let nn = free.len();
        for (row, &fi) in free.iter().enumerate() {
            let Some(i) = fi else { continue };
            rhs[i] += eload[row];
            for (col, &fj) in free.iter().enumerate() {
                if let Some(j) = fj {
                    if i >= j {
                        matrix.add(i, j, emat[row * nn + col]);
                    }
                }
            }
        }
        // interface load from the outer-ring trace at r = b (local li = 0)
        if elem.region == Region::Minus && elem.band_index == interface_band {
            let tload = interface_load(space, elem, problem, quad_order);
            for (lj, &v) in tload.iter().enumerate() {
                if let Some(i) = free[lj] {
                    // row of local node (li = 0, lj)
                    rhs[i] += v;
                }
            }
        }
    }

    Ok(SparseSystem { n: n_free, matrix, rhs })
}

/// Direct solve with Jacobi equilibration and iterative refinement.
pub fn solve_spd(system: &SparseSystem) -> Result<Vec<f64>> {
    let n = system.n;
    let a = &system.matrix;
    let norm_b = norm2(&system.rhs);
    if norm_b == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let mut s = vec![0.0; n];
    for i in 0..n {
        let d = a.diag(i);
        if !(d > 0.0) {
            return Err(Error::Breakdown {
                pivot: i,
                detail: format!("diagonal entry {d:e} is not positive"),
            });
        }
        s[i] = 1.0 / d.sqrt();
    }
    let mut scaled = a.clone();
    scaled.scale_sym(&s);
    let factor = scaled.factorize()?;

    // x = S · solve(S b)
    let solve_scaled = |r: &[f64]| -> Vec<f64> {
        let mut z: Vec<f64> = r.iter().zip(&s).map(|(v, si)| v * si).collect();
        factor.solve_in_place(&mut z);
        for (zi, si) in z.iter_mut().zip(&s) {
            *zi *= si;
        }
        z
    };

    let mut x = solve_scaled(&system.rhs);
    let mut resid = vec![0.0; n];
    for _ in 0..=2 {
        a.matvec(&x, &mut resid);
        for i in 0..n {
            resid[i] = system.rhs[i] - resid[i];
        }
        let rel = norm2(&resid) / norm_b;
        if rel <= 1e-12 {
            return Ok(x);
        }
        let dx = solve_scaled(&resid);
        for i in 0..n {
            x[i] += dx[i];
        }
    }
    a.matvec(&x, &mut resid);
    for i in 0..n {
        resid[i] = system.rhs[i] - resid[i];
    }
    let rel = norm2(&resid) / norm_b;
    if rel <= 1e-10 {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "direct solve residual {rel:e} exceeds the 1e-10 contract"
        )))
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AnnularGeometry;
    use crate::mesh::build_mesh;
    use crate::problem::DataCase;
    use crate::space::build_space;

    fn geom() -> AnnularGeometry {
        AnnularGeometry::new(1.0, 2.0, 3.0).unwrap()
    }

    fn setup(eps: f64, p: usize, m: usize) -> (crate::mesh::LayerMesh, FeSpace, TransmissionProblem) {
        let mesh = build_mesh(&geom(), eps, p, 1.0, m).unwrap();
        let space = build_space(&mesh);
        let problem = TransmissionProblem::new(geom(), eps, DataCase::Const).unwrap();
        (mesh, space, problem)
    }

    #[test]
    fn rejects_low_quadrature_order() {
        let (mesh, space, problem) = setup(0.1, 3, 8);
        assert!(assemble(&space, &mesh, &problem, 3).is_err());
        assert!(assemble(&space, &mesh, &problem, 4).is_ok());
    }

    #[test]
    fn mass_times_ones_integrates_the_area() {
        // Σφ = 1 per element, so summing the pure-mass element matrices over
        // all entries integrates 1 over the annulus: 8π
        let (mesh, space, problem) = setup(0.1, 3, 8);
        let mut total = 0.0;
        for elem in &mesh.elements {
            let (emat, _) = element_system(&space, elem, &problem, 6, 0.0, 1.0);
            total += emat.iter().sum::<f64>();
        }
        let area = 8.0 * std::f64::consts::PI;
        assert!(((total - area) / area).abs() < 1e-10, "{total} vs {area}");
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let (mesh, space, problem) = setup(0.1, 3, 8);
        for elem in mesh.elements.iter().step_by(5) {
            let (emat, _) = element_system(&space, elem, &problem, 6, 1.0, 0.0);
            let nn = (space.p + 1) * (space.p + 1);
            for row in 0..nn {
                let sum: f64 = (0..nn).map(|col| emat[row * nn + col]).sum();
                assert!(sum.abs() < 1e-10, "row {row} sums to {sum:e}");
            }
        }
    }

    #[test]
    fn assembled_matrix_is_spd_and_solvable() {
        let (mesh, space, problem) = setup(0.05, 3, 8);
        let sys = assemble(&space, &mesh, &problem, 5).unwrap();
        assert_eq!(sys.n, space.n_free);
        // positive definiteness on a few random directions
        let mut next = {
            let mut s = 5u64;
            move || {
                s = s.wrapping_add(0x9e3779b97f4a7c15);
                let mut z = s;
                z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
                z ^= z >> 31;
                (z >> 11) as f64 / (1u64 << 53) as f64
            }
        };
        let mut y = vec![0.0; sys.n];
        for _ in 0..5 {
            let x: Vec<f64> = (0..sys.n).map(|_| 2.0 * next() - 1.0).collect();
            sys.matrix.matvec(&x, &mut y);
            let quad: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            assert!(quad > 0.0);
        }
        // residual contract
        let x = solve_spd(&sys).unwrap();
        sys.matrix.matvec(&x, &mut y);
        let res: f64 = y
            .iter()
            .zip(&sys.rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let nb: f64 = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res / nb <= 1e-10, "residual {:e}", res / nb);
    }

    #[test]
    fn zero_data_solves_to_zero() {
        let (mesh, space, _) = setup(0.1, 2, 8);
        let problem = TransmissionProblem::new(geom(), 0.1, DataCase::Const)
            .unwrap()
            .with_loads(0.0, 0.0);
        let sys = assemble(&space, &mesh, &problem, 4).unwrap();
        let x = solve_spd(&sys).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn solution_scales_exactly_with_the_data() {
        let (mesh, space, _) = setup(0.1, 2, 8);
        let p1 = TransmissionProblem::new(geom(), 0.1, DataCase::Const)
            .unwrap()
            .with_loads(1.0, 1.0)
            .with_interface_flux(0.25);
        let p2 = TransmissionProblem::new(geom(), 0.1, DataCase::Const)
            .unwrap()
            .with_loads(2.0, 2.0)
            .with_interface_flux(0.5);
        let x1 = solve_spd(&assemble(&space, &mesh, &p1, 4).unwrap()).unwrap();
        let x2 = solve_spd(&assemble(&space, &mesh, &p2, 4).unwrap()).unwrap();
        // doubling (f₊, f₋, h) doubles the solution bitwise
        for (a, b) in x1.iter().zip(&x2) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn interface_flux_enters_through_the_trace() {
        // with zero loads and nonzero h the solution is nonzero and matches
        // the exact layered solution at a probe radius
        let eps = 0.5;
        let mesh = build_mesh(&geom(), eps, 6, 1.0, 8).unwrap();
        let space = build_space(&mesh);
        let problem = TransmissionProblem::new(geom(), eps, DataCase::Const)
            .unwrap()
            .with_loads(0.0, 0.0)
            .with_interface_flux(1.0);
        let sys = assemble(&space, &mesh, &problem, 8).unwrap();
        let x = solve_spd(&sys).unwrap();
        let field = crate::space::DiscreteField { coeffs: x };
        let exact = crate::oracle::radial_exact(&geom(), eps, 0.0, 0.0, 1.0).unwrap();
        // center of an outer-ring element at the interface radius line
        let elem = mesh.element(mesh.interface_break(), 0);
        let (r, _) = elem.polar(0.0, 0.0);
        let got = space.eval(&field, elem, 0.0, 0.0);
        let want = exact.eval(r).0;
        assert!(
            (got - want).abs() < 1e-5 * want.abs().max(1e-3),
            "u_N({r}) = {got} vs exact {want}"
        );
    }

    #[test]
    fn rotational_symmetry_of_nodal_values() {
        let (mesh, space, problem) = setup(0.01, 4, 8);
        let sys = assemble(&space, &mesh, &problem, 6).unwrap();
        let x = solve_spd(&sys).unwrap();
        // rotating one sector shifts the angular index by p
        for ir in 1..space.n_r - 1 {
            for it in 0..space.n_t {
                let g1 = ir * space.n_t + it;
                let g2 = ir * space.n_t + (it + space.p) % space.n_t;
                let (v1, v2) = (
                    x[space.free_of_grid[g1].unwrap()],
                    x[space.free_of_grid[g2].unwrap()],
                );
                assert!(
                    (v1 - v2).abs() <= 1e-9 * (1.0 + v1.abs()),
                    "asymmetry {:e} at ir={ir}",
                    v1 - v2
                );
            }
        }
    }
}
