//! Closed-form exact solutions of the radial reduction
//! `-w (u'' + u'/r) + u = f` with the transmission coupling at `r = b`:
//! the layered benchmark for constant data, its ε→0 limit on the outer ring,
//! and the polynomial manufactured case.

use crate::bessel::{self, bessel_scaled};
use crate::geometry::{AnnularGeometry, Region};
use crate::problem::{DataCase, TransmissionProblem};
use crate::{Error, Result};

/// Exact radial solution for constant data.
///
/// Stored in an overflow-safe scaled form anchored at `r = b`:
///
/// ```text
/// u₊(r) = f₊ + At · i0e(r/ε) e^{(r-b)/ε} + Bt · k0e(r/ε) e^{-(r-a)/ε}
/// u₋(r) = f₋ + C · I₀(r) + D · K₀(r)
/// ```
///
/// so every exponential factor that appears at evaluation time is ≤ 1 for
/// `a ≤ r ≤ b`; this stays finite down to ε = 1e-8.
#[derive(Debug, Clone)]
pub struct RadialExact {
    pub geom: AnnularGeometry,
    pub eps: f64,
    pub f_plus: f64,
    pub f_minus: f64,
    pub h: f64,
    pub at: f64,
    pub bt: f64,
    pub c: f64,
    pub d: f64,
}

/// Solve the four connection conditions (Dirichlet at `a` and `c`,
/// continuity and flux jump at `b`) for the scaled coefficients.
pub fn radial_exact(
    geom: &AnnularGeometry,
    eps: f64,
    f_plus: f64,
    f_minus: f64,
    h: f64,
) -> Result<RadialExact> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Config(format!(
            "perturbation parameter must lie in (0, 1], got {eps}"
        )));
    }
    let (a, b, c) = (geom.a, geom.b, geom.c);
    let e = ((a - b) / eps).exp();
    let sa = bessel_scaled(a / eps);
    let sb = bessel_scaled(b / eps);
    let (i0b, i1b, k0b, k1b) = (bessel::i0(b), bessel::i1(b), bessel::k0(b), bessel::k1(b));
    let (i0c, k0c) = (bessel::i0(c), bessel::k0(c));

    let mat = vec![
        vec![sa.i0e * e, sa.k0e, 0.0, 0.0],
        vec![sb.i0e, sb.k0e * e, -i0b, -k0b],
        vec![eps * sb.i1e, -eps * sb.k1e * e, -i1b, k1b],
        vec![0.0, 0.0, i0c, k0c],
    ];
    let rhs = vec![-f_plus, f_minus - f_plus, h, -f_minus];
    let coef = solve_dense(mat, rhs)?;

    let sol = RadialExact {
        geom: *geom,
        eps,
        f_plus,
        f_minus,
        h,
        at: coef[0],
        bt: coef[1],
        c: coef[2],
        d: coef[3],
    };

    // construction-time contract: the four transmission conditions
    let scale = 1.0 + f_plus.abs().max(f_minus.abs()).max(h.abs());
    let (ua, _) = sol.eval_in(a, Region::Plus);
    let (uc, _) = sol.eval_in(c, Region::Minus);
    let (upb, dupb) = sol.eval_in(b, Region::Plus);
    let (umb, dumb) = sol.eval_in(b, Region::Minus);
    let defect = ua
        .abs()
        .max(uc.abs())
        .max((upb - umb).abs())
        .max((eps * eps * dupb - dumb - h).abs());
    if !(defect <= 1e-10 * scale) {
        return Err(Error::Numerical(format!(
            "radial connection solve violated its transmission conditions (defect {defect:e})"
        )));
    }
    Ok(sol)
}

impl RadialExact {
    /// Value and radial derivative at `r`, taking the side from the radius
    /// (the interface itself evaluates on the outer side).
    pub fn eval(&self, r: f64) -> (f64, f64) {
        self.eval_in(r, self.geom.region_of(r))
    }

    /// One-sided value and radial derivative; `region` selects the branch at
    /// `r = b` where the derivative jumps.
    pub fn eval_in(&self, r: f64, region: Region) -> (f64, f64) {
        let g = &self.geom;
        assert!(
            r >= g.a - 1e-12 && r <= g.c + 1e-12,
            "radius {r} outside the annulus [{}, {}]",
            g.a,
            g.c
        );
        match region {
            Region::Plus => {
                let eps = self.eps;
                let s = bessel_scaled(r / eps);
                let ei = ((r - g.b) / eps).exp();
                let ek = (-(r - g.a) / eps).exp();
                let u = self.f_plus + self.at * s.i0e * ei + self.bt * s.k0e * ek;
                let du = (self.at * s.i1e * ei - self.bt * s.k1e * ek) / eps;
                (u, du)
            }
            Region::Minus => {
                let u = self.f_minus + self.c * bessel::i0(r) + self.d * bessel::k0(r);
                let du = self.c * bessel::i1(r) - self.d * bessel::k1(r);
                (u, du)
            }
        }
    }
}

/// ε→0 limit on the outer ring: `-(u'' + u'/r) + u = f₋` on `(b, c)` with
/// `u'(b) = -h` and `u(c) = 0`; the inner-ring limit is the constant `f₊`.
#[derive(Debug, Clone)]
pub struct LimitSolution {
    pub f_minus: f64,
    pub c0: f64,
    pub d0: f64,
}

pub fn limit_solution(geom: &AnnularGeometry, f_minus: f64, h: f64) -> Result<LimitSolution> {
    let (b, c) = (geom.b, geom.c);
    let mat = vec![
        vec![bessel::i1(b), -bessel::k1(b)],
        vec![bessel::i0(c), bessel::k0(c)],
    ];
    let rhs = vec![-h, -f_minus];
    let coef = solve_dense(mat, rhs)?;
    Ok(LimitSolution { f_minus, c0: coef[0], d0: coef[1] })
}

impl LimitSolution {
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let u = self.f_minus + self.c0 * bessel::i0(r) + self.d0 * bessel::k0(r);
        let du = self.c0 * bessel::i1(r) - self.d0 * bessel::k1(r);
        (u, du)
    }
}

/// The manufactured exact solution `u = (r-a)(c-r)` and its derivative.
pub fn manufactured(geom: &AnnularGeometry, r: f64) -> (f64, f64) {
    ((r - geom.a) * (geom.c - r), geom.a + geom.c - 2.0 * r)
}

/// Uniform handle on "the exact solution of this problem" for error norms.
#[derive(Debug, Clone)]
pub enum ExactSolution {
    /// Bessel-form layered solution (constant data).
    Layered(RadialExact),
    /// The manufactured polynomial `(r-a)(c-r)`.
    Polynomial(AnnularGeometry),
}

impl ExactSolution {
    pub fn for_problem(problem: &TransmissionProblem) -> Result<Self> {
        match problem.case {
            DataCase::Const => {
                let (fp, fm) = problem.const_loads();
                Ok(ExactSolution::Layered(radial_exact(
                    &problem.geom,
                    problem.eps,
                    fp,
                    fm,
                    problem.h_datum(),
                )?))
            }
            DataCase::Manufactured => Ok(ExactSolution::Polynomial(problem.geom)),
        }
    }

    /// One-sided `(u, du/dr)`.
    pub fn eval_in(&self, r: f64, region: Region) -> (f64, f64) {
        match self {
            ExactSolution::Layered(s) => s.eval_in(r, region),
            ExactSolution::Polynomial(g) => manufactured(g, r),
        }
    }
}

/// Dense Gaussian elimination with partial pivoting for the tiny connection
/// systems (n ≤ 4).
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if a[piv][k] == 0.0 {
            return Err(Error::Numerical("singular connection system".into()));
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            if l != 0.0 {
                for j in k..n {
                    let akj = a[k][j];
                    a[i][j] -= l * akj;
                }
                b[i] -= l * b[k];
            }
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * b[j];
        }
        b[i] = s / a[i][i];
    }
    Ok(b)
}
