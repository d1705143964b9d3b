//! 1-D quadrature rules and the nodal Lagrange basis for tensor elements.
//!
//! Provides:
//! - [`gauss_legendre`]: interior Gauss rule, exact through degree `2n-1`
//! - [`gauss_lobatto`]: endpoint-including rule on `p+1` points, exact
//!   through degree `2p-1`; its nodes double as the element node set
//! - [`NodalBasis1D`]: barycentric Lagrange basis on an arbitrary node set
//!
//! All rules live on the reference interval `[-1, 1]`.  Interior Lobatto
//! nodes are the roots of `P_p'`; each one is bracketed between two adjacent
//! Gauss-Legendre nodes (the roots strictly interlace), so the damped Newton
//! iteration below cannot escape its bracket and falls back to bisection
//! whenever a step would.

use crate::{Error, Result};

/// Nodes and weights of a 1-D rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[lo, hi]` by affine transport of the rule.
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Legendre polynomial `P_n` and its derivative at `x` (three-term recurrence).
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut pm = 1.0; // P_{k-1}
    let mut p = x; // P_k
    for k in 1..n {
        let kf = k as f64;
        let pn = ((2.0 * kf + 1.0) * x * p - kf * pm) / (kf + 1.0);
        pm = p;
        p = pn;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1), |x| < 1
    let d = if (x * x - 1.0).abs() < 1e-300 {
        // limiting value at the endpoints
        let nf = n as f64;
        let sgn = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        sgn * nf * (nf + 1.0) / 2.0
    } else {
        (n as f64) * (x * p - pm) / (x * x - 1.0)
    };
    (p, d)
}

/// Gauss-Legendre rule with `n >= 1` points.
///
/// Newton iteration from the classical Chebyshev-based initial guesses
/// `cos(π(4i+3)/(4n+2))`; converges monotonically for every root.
pub fn gauss_legendre(n: usize) -> QuadRule {
    assert!(n >= 1, "gauss_legendre requires n >= 1");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (4.0 * i as f64 + 3.0) / (4.0 * n as f64 + 2.0)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        // guesses start near +1 and walk down; store mirrored pair
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_pair(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    QuadRule { nodes, weights }
}

/// Gauss-Lobatto rule with `p+1 >= 2` points (`p` is the polynomial degree
/// of the element that uses these nodes).  Exact through degree `2p-1`.
pub fn gauss_lobatto(p: usize) -> QuadRule {
    assert!(p >= 1, "gauss_lobatto requires p >= 1");
    if p == 1 {
        return QuadRule {
            nodes: vec![-1.0, 1.0],
            weights: vec![1.0, 1.0],
        };
    }
    let pf = p as f64;
    let gl = gauss_legendre(p);
    let mut nodes = vec![0.0; p + 1];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    // interior nodes: roots of P_p', one per Gauss-node gap
    for j in 0..p - 1 {
        let (mut lo, mut hi) = (gl.nodes[j], gl.nodes[j + 1]);
        let mut flo = legendre_pair(p, lo).1;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let (pv, dv) = legendre_pair(p, x);
            let fx = dv;
            // P_p'' from the Legendre ODE: (1-x²)P'' = 2xP' - p(p+1)P·(-1)...
            let fpx = (2.0 * x * dv - pf * (pf + 1.0) * pv) / (1.0 - x * x);
            if fx * flo < 0.0 {
                hi = x;
            } else {
                lo = x;
                flo = fx;
            }
            let step = fx / fpx;
            let cand = x - step;
            if step.abs() <= 1e-15 * x.abs().max(0.5) {
                // converged: keep the refined point — falling through to the
                // bracket fallback here would discard the root
                if cand.is_finite() {
                    x = cand;
                }
                break;
            }
            x = if cand > lo && cand < hi {
                cand
            } else {
                0.5 * (lo + hi) // bisection fallback
            };
            if (hi - lo) <= 4.0 * f64::EPSILON {
                break;
            }
        }
        nodes[j + 1] = x;
    }
    // enforce the exact symmetry of the node set
    for j in 1..=(p - 1) / 2 + 1 {
        if j <= p - j {
            let s = 0.5 * (nodes[p - j] - nodes[j]);
            nodes[p - j] = s;
            nodes[j] = -s;
        }
    }
    if p % 2 == 0 {
        nodes[p / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (pv, _) = legendre_pair(p, x);
            2.0 / (pf * (pf + 1.0) * pv * pv)
        })
        .collect();
    QuadRule { nodes, weights }
}

/// Barycentric Lagrange basis on a fixed node set.
///
/// Evaluation is the second (true) barycentric formula, which is stable for
/// the clustered Lobatto nodes; derivative values come from the analytic
/// differentiation of the same formula, with the differentiation-matrix row
/// used when the evaluation point coincides with a node.
#[derive(Debug, Clone)]
pub struct NodalBasis1D {
    pub nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl NodalBasis1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::Config("empty node set".into()));
        }
        let mut bary = vec![1.0f64; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let d = nodes[i] - nodes[j];
                    if d == 0.0 {
                        return Err(Error::Config(format!("duplicate node at index {i}")));
                    }
                    bary[i] *= d;
                }
            }
            bary[i] = 1.0 / bary[i];
        }
        // normalize: barycentric evaluation is invariant under scaling
        let m = bary.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        for v in &mut bary {
            *v /= m;
        }
        Ok(Self { nodes, bary })
    }

    /// Lobatto nodal basis of degree `p`.
    pub fn lobatto(p: usize) -> Self {
        Self::new(gauss_lobatto(p).nodes).expect("lobatto nodes are distinct")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn node_hit(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&xi| (x - xi).abs() < 5e-15)
    }

    /// All basis values at `x` into `out` (length = number of nodes).
    pub fn values_into(&self, x: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        if let Some(i) = self.node_hit(x) {
            out.fill(0.0);
            out[i] = 1.0;
            return;
        }
        let mut s = 0.0;
        for (o, (&xi, &wi)) in out.iter_mut().zip(self.nodes.iter().zip(&self.bary)) {
            let t = wi / (x - xi);
            *o = t;
            s += t;
        }
        for o in out.iter_mut() {
            *o /= s;
        }
    }

    /// Basis values and first derivatives at `x`.
    pub fn values_derivs_into(&self, x: f64, vals: &mut [f64], ders: &mut [f64]) {
        let n = self.len();
        debug_assert!(vals.len() == n && ders.len() == n);
        if let Some(i) = self.node_hit(x) {
            vals.fill(0.0);
            vals[i] = 1.0;
            // differentiation-matrix row i: l_j'(x_i)
            let mut dii = 0.0;
            for j in 0..n {
                if j != i {
                    let d = (self.bary[j] / self.bary[i]) / (self.nodes[i] - self.nodes[j]);
                    ders[j] = d;
                    dii -= d;
                }
            }
            ders[i] = dii;
            return;
        }
        let mut s = 0.0;
        let mut t = 0.0;
        for j in 0..n {
            let q = self.bary[j] / (x - self.nodes[j]);
            vals[j] = q;
            s += q;
            t += q / (x - self.nodes[j]);
        }
        for j in 0..n {
            let l = vals[j] / s;
            vals[j] = l;
            ders[j] = l * (t / s - 1.0 / (x - self.nodes[j]));
        }
    }

    /// Interpolate `f` on the node set (the nodal interpolation operator):
    /// the returned coefficients are simply the node values.
    pub fn interpolate(&self, mut f: impl FnMut(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Evaluate the interpolant with nodal coefficients `coef` at `x`.
    pub fn eval(&self, coef: &[f64], x: f64) -> f64 {
        let mut vals = vec![0.0; self.len()];
        self.values_into(x, &mut vals);
        vals.iter().zip(coef).map(|(v, c)| v * c).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gauss_legendre_small_rules_match_closed_forms() {
        let r = gauss_legendre(1);
        assert_abs_diff_eq!(r.nodes[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 2.0, epsilon = 1e-15);

        let r = gauss_legendre(2);
        let x = 1.0 / 3.0f64.sqrt();
        assert_abs_diff_eq!(r.nodes[0], -x, epsilon = 1e-15);
        assert_abs_diff_eq!(r.nodes[1], x, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gauss_legendre_n5_matches_reference() {
        // reference values from an independent implementation
        let r = gauss_legendre(5);
        let nodes = [
            -0.90617984593866396,
            -0.53846931010568311,
            0.0,
            0.53846931010568311,
            0.90617984593866396,
        ];
        let weights = [
            0.23692688505618942,
            0.47862867049936619,
            0.568888888888889,
            0.47862867049936619,
            0.23692688505618942,
        ];
        for i in 0..5 {
            assert_abs_diff_eq!(r.nodes[i], nodes[i], epsilon = 1e-14);
            assert_abs_diff_eq!(r.weights[i], weights[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_moment_exactness() {
        for n in 1..=12 {
            let r = gauss_legendre(n);
            for k in 0..=(2 * n - 1) {
                let num: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(&x, &w)| w * x.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn lobatto_small_rules_match_closed_forms() {
        let r = gauss_lobatto(2);
        assert_eq!(r.nodes, vec![-1.0, 0.0, 1.0]);
        assert_abs_diff_eq!(r.weights[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 4.0 / 3.0, epsilon = 1e-15);

        let r = gauss_lobatto(3);
        assert_abs_diff_eq!(r.nodes[1], -1.0 / 5.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 5.0 / 6.0, epsilon = 1e-15);

        let r = gauss_lobatto(4);
        assert_abs_diff_eq!(r.nodes[1], -(3.0f64 / 7.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[1], 49.0 / 90.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.weights[2], 32.0 / 45.0, epsilon = 1e-15);
    }

    #[test]
    fn lobatto_p8_matches_reference() {
        // reference values from an independent 50-digit computation
        let r = gauss_lobatto(8);
        let nodes = [
            -1.0,
            -0.89975799541146016,
            -0.67718627951073775,
            -0.36311746382617816,
            0.0,
            0.36311746382617816,
            0.67718627951073775,
            0.89975799541146016,
            1.0,
        ];
        let weights = [
            0.027777777777777778,
            0.16549536156080553,
            0.27453871250016174,
            0.34642851097304635,
            0.37151927437641723,
            0.34642851097304635,
            0.27453871250016174,
            0.16549536156080553,
            0.027777777777777778,
        ];
        for i in 0..9 {
            assert_abs_diff_eq!(r.nodes[i], nodes[i], epsilon = 1e-14);
            assert_abs_diff_eq!(r.weights[i], weights[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn lobatto_weights_sum_and_symmetry() {
        for p in 1..=14 {
            let r = gauss_lobatto(p);
            let s: f64 = r.weights.iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
            for j in 0..=p {
                assert_abs_diff_eq!(r.nodes[j], -r.nodes[p - j], epsilon = 1e-15);
                assert_abs_diff_eq!(r.weights[j], r.weights[p - j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn lobatto_moment_exactness_through_2p_minus_1() {
        for p in 1..=12 {
            let r = gauss_lobatto(p);
            for k in 0..=(2 * p - 1) {
                let num: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(&x, &w)| w * x.powi(k as i32))
                    .sum();
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn barycentric_reproduces_polynomials() {
        let basis = NodalBasis1D::lobatto(3);
        let f = |x: f64| 2.0 * x * x * x - x + 0.5;
        let coef = basis.interpolate(f);
        for &x in &[-0.9, -0.3, 0.123456, 0.77, 1.0, -1.0, 0.0] {
            assert_abs_diff_eq!(basis.eval(&coef, x), f(x), epsilon = 1e-13);
        }
    }

    #[test]
    fn barycentric_delta_property_and_derivatives() {
        let basis = NodalBasis1D::lobatto(5);
        let n = basis.len();
        let mut vals = vec![0.0; n];
        let mut ders = vec![0.0; n];
        for i in 0..n {
            basis.values_into(basis.nodes[i], &mut vals);
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(vals[j], expect, epsilon = 1e-14);
            }
        }
        // derivative of the interpolant of x^4 is 4x^3, both at and off nodes
        let coef = basis.interpolate(|x| x.powi(4));
        for &x in &[-1.0, -0.5, 0.0, 0.3, basis.nodes[2], 0.999, 1.0] {
            basis.values_derivs_into(x, &mut vals, &mut ders);
            let d: f64 = ders.iter().zip(&coef).map(|(v, c)| v * c).sum();
            assert_abs_diff_eq!(d, 4.0 * x.powi(3), epsilon = 1e-12);
        }
    }

    #[test]
    fn lebesgue_constant_grows_at_most_logarithmically() {
        // nodal interpolation stability: the 1-D Lebesgue constant of the
        // Lobatto node set is bounded by 1 + ln(p+1), hence the tensor
        // operator norm by (1 + ln(p+1))^2
        for p in 1..=12 {
            let basis = NodalBasis1D::lobatto(p);
            let mut vals = vec![0.0; basis.len()];
            let mut leb: f64 = 0.0;
            let m = 2000;
            for k in 0..=m {
                let x = -1.0 + 2.0 * k as f64 / m as f64;
                basis.values_into(x, &mut vals);
                leb = leb.max(vals.iter().map(|v| v.abs()).sum());
            }
            assert!(
                leb <= 1.0 + ((p + 1) as f64).ln(),
                "p={p}: Lebesgue {leb} exceeds bound"
            );
        }
    }
}
