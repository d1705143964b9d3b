//! Symmetric profile (skyline) matrices and their LDLᵀ factorization.
//!
//! Row `i` stores the contiguous span `first[i] ..= i` of its lower
//! triangle.  For the ring-major FE numbering the profile is a narrow band
//! (width about `(p+1)·n_t`) that the θ-periodic seam widens only slightly,
//! so a dense-in-profile direct factorization is both simple and fast at the
//! problem sizes here (N ≤ ~10⁴).  No pivoting: the assembled operator is
//! symmetric positive definite, and a nonpositive pivot is reported as a
//! breakdown rather than repaired.

use crate::{Error, Result};

/// Symmetric matrix in row-profile storage (lower triangle only).
#[derive(Debug, Clone)]
pub struct Profile {
    pub n: usize,
    /// First stored column of each row, `first[i] <= i`.
    pub first: Vec<usize>,
    /// Offset of row `i` in `vals`; row `i` holds `i - first[i] + 1` entries
    /// ending at the diagonal.
    pub start: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Profile {
    /// Zero matrix with the given row profile.
    pub fn new(first: Vec<usize>) -> Self {
        let n = first.len();
        let mut start = Vec::with_capacity(n);
        let mut total = 0usize;
        for (i, &f) in first.iter().enumerate() {
            assert!(f <= i, "row {i} starts after its diagonal");
            start.push(total);
            total += i - f + 1;
        }
        Profile { n, first, start, vals: vec![0.0; total] }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j >= self.first[i] && j <= i);
        self.start[i] + (j - self.first[i])
    }

    /// Add `v` at `(i, j)`; the caller may pass the indices in either order,
    /// the entry lands in the lower triangle.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        assert!(
            lo >= self.first[hi],
            "entry ({hi}, {lo}) outside the row profile starting at {}",
            self.first[hi]
        );
        let at = self.idx(hi, lo);
        self.vals[at] += v;
    }

    /// Entry `(i, j)` with symmetric lookup; zero outside the profile.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if lo < self.first[hi] {
            0.0
        } else {
            self.vals[self.idx(hi, lo)]
        }
    }

    /// Diagonal entry.
    pub fn diag(&self, i: usize) -> f64 {
        self.vals[self.idx(i, i)]
    }

    /// Full symmetric matrix-vector product `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for i in 0..self.n {
            let f = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i] + (i - f + 1)];
            let mut acc = 0.0;
            for (off, &a) in row.iter().enumerate() {
                let j = f + off;
                acc += a * x[j];
                if j < i {
                    y[j] += a * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// In-place symmetric diagonal scaling `A ← S A S` with `S = diag(s)`.
    pub fn scale_sym(&mut self, s: &[f64]) {
        assert_eq!(s.len(), self.n);
        for i in 0..self.n {
            let f = self.first[i];
            for off in 0..=(i - f) {
                self.vals[self.start[i] + off] *= s[i] * s[f + off];
            }
        }
    }

    /// LDLᵀ factorization sharing this profile.  Fails with the pivot index
    /// if a pivot is not strictly positive (loss of positive definiteness).
    pub fn factorize(&self) -> Result<Factor> {
        let n = self.n;
        let mut l = self.clone();
        let mut d = vec![0.0; n];
        // v[j] holds L_ij · d_j for the active row i
        let mut v = vec![0.0; n];
        for i in 0..n {
            let fi = l.first[i];
            for j in fi..i {
                let fj = l.first[j];
                let lo = fi.max(fj);
                let mut s = l.vals[l.start[i] + (j - fi)];
                let rj = l.start[j] + (lo - fj);
                for k in 0..j - lo {
                    s -= l.vals[rj + k] * v[lo + k];
                }
                v[j] = s;
                l.vals[l.start[i] + (j - fi)] = s / d[j];
            }
            let mut s = l.vals[l.start[i] + (i - fi)];
            for j in fi..i {
                s -= l.vals[l.start[i] + (j - fi)] * v[j];
            }
            if !(s > 0.0) {
                return Err(Error::Breakdown {
                    pivot: i,
                    detail: format!("pivot value {s:e} is not positive"),
                });
            }
            d[i] = s;
            l.vals[l.start[i] + (i - fi)] = 1.0;
        }
        Ok(Factor { l, d })
    }
}

/// The factors of `A = L D Lᵀ` with unit-diagonal `L` in profile storage.
#[derive(Debug, Clone)]
pub struct Factor {
    l: Profile,
    d: Vec<f64>,
}

impl Factor {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.l.n;
        assert_eq!(x.len(), n);
        // forward: L z = b
        for i in 0..n {
            let f = self.l.first[i];
            let row = &self.l.vals[self.l.start[i]..self.l.start[i] + (i - f)];
            let mut s = x[i];
            for (off, &a) in row.iter().enumerate() {
                s -= a * x[f + off];
            }
            x[i] = s;
        }
        // diagonal
        for i in 0..n {
            x[i] /= self.d[i];
        }
        // backward: Lᵀ x = w, column sweep
        for i in (0..n).rev() {
            let f = self.l.first[i];
            let xi = x[i];
            let row = &self.l.vals[self.l.start[i]..self.l.start[i] + (i - f)];
            for (off, &a) in row.iter().enumerate() {
                x[f + off] -= a * xi;
            }
        }
    }
}
