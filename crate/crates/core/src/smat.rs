//! Dense symmetric matrices of dimension at most six.
//!
//! Every semidefinite condition in this crate is a small dense matrix, so a
//! cyclic Jacobi eigensolver is used throughout. Only the upper triangle is
//! stored.

use std::fmt;

/// Largest supported dimension.
pub const MAX_DIM: usize = 6;
const PACKED: usize = MAX_DIM * (MAX_DIM + 1) / 2;

/// Tolerances shared by every membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    /// Relative floor for the smallest eigenvalue, scaled by `1 + max|S_ij|`.
    pub psd_tol: f64,
    /// Absolute slack allowed on linear constraints.
    pub eq_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { psd_tol: 1e-9, eq_tol: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn new(psd_tol: f64, eq_tol: f64) -> Self {
        assert!(psd_tol > 0.0 && eq_tol > 0.0, "tolerances must be strictly positive");
        Self { psd_tol, eq_tol }
    }

    /// Both tolerances multiplied by `factor`.
    pub fn loosened(&self, factor: f64) -> Self {
        Self::new(self.psd_tol * factor, self.eq_tol * factor)
    }
}

#[derive(Clone, Copy, PartialEq)]
pub struct SymMat {
    dim: usize,
    upper: [f64; PACKED],
}

#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle
    i * dim - i * (i + 1) / 2 + j
}

impl SymMat {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} outside 1..={MAX_DIM}");
        Self { dim, upper: [0.0; PACKED] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle (`i <= j`).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from full rows. Panics if the rows are not square or
    /// not symmetric to within `1e-12`.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), dim, "row {i} has wrong length");
            for j in 0..i {
                let (a, b) = (r[j], rows[j].as_ref()[i]);
                assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())), "matrix is not symmetric at ({i},{j})");
            }
        }
        Self::from_fn(dim, |i, j| rows[i].as_ref()[j])
    }

    /// The Gram matrix `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.upper[packed_index(self.dim, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.upper[packed_index(self.dim, i, j)] = value;
    }

    /// Number of stored entries, `dim (dim + 1) / 2`.
    pub fn packed_len(&self) -> usize {
        self.dim * (self.dim + 1) / 2
    }

    pub fn packed(&self) -> &[f64] {
        &self.upper[..self.packed_len()]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    pub fn min_entry(&self) -> f64 {
        self.packed().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(self.dim, |i, j| s * self.get(i, j))
    }

    pub fn shift(&self, c: f64) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) + if i == j { c } else { 0.0 })
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    /// `wᵀ S w`.
    pub fn quad_form(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            s += self.get(i, i) * w[i] * w[i];
            for j in i + 1..self.dim {
                s += 2.0 * self.get(i, j) * w[i] * w[j];
            }
        }
        s
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.dim;
        let mut a = [[0.0; MAX_DIM]; MAX_DIM];
        for (i, row) in a.iter_mut().enumerate().take(n) {
            for (j, v) in row.iter_mut().enumerate().take(n) {
                *v = self.get(i, j);
            }
        }
        let mut det = 1.0;
        for k in 0..n {
            let p = (k..n).max_by(|&r, &s| a[r][k].abs().total_cmp(&a[s][k].abs())).unwrap();
            if a[p][k] == 0.0 {
                return 0.0;
            }
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= a[k][k];
            for r in k + 1..n {
                let f = a[r][k] / a[k][k];
                for c in k..n {
                    a[r][c] -= f * a[k][c];
                }
            }
        }
        det
    }

    /// Full eigendecomposition by cyclic Jacobi rotations. Returns eigenvalues
    /// in ascending order and the matching unit eigenvectors.
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let n = self.dim;
        let mut a = [[0.0; MAX_DIM]; MAX_DIM];
        let mut v = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            v[i][i] = 1.0;
            for j in 0..n {
                a[i][j] = self.get(i, j);
            }
        }
        let scale: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if scale > 0.0 {
            for _sweep in 0..64 {
                let mut off = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        off += a[i][j] * a[i][j];
                    }
                }
                if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off < f64::MIN_POSITIVE {
                    break;
                }
                for p in 0..n {
                    for q in p + 1..n {
                        let apq = a[p][q];
                        if apq == 0.0 {
                            continue;
                        }
                        let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                        let t = if theta == 0.0 { 1.0 } else { t };
                        let c = 1.0 / (t * t + 1.0).sqrt();
                        let s = t * c;
                        for k in 0..n {
                            let akp = a[k][p];
                            let akq = a[k][q];
                            a[k][p] = c * akp - s * akq;
                            a[k][q] = s * akp + c * akq;
                        }
                        for k in 0..n {
                            let apk = a[p][k];
                            let aqk = a[q][k];
                            a[p][k] = c * apk - s * aqk;
                            a[q][k] = s * apk + c * aqk;
                        }
                        for row in v.iter_mut().take(n) {
                            let vkp = row[p];
                            let vkq = row[q];
                            row[p] = c * vkp - s * vkq;
                            row[q] = s * vkp + c * vkq;
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
        let values = order.iter().map(|&k| a[k][k]).collect();
        let vectors = order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect();
        (values, vectors)
    }

    /// Smallest eigenvalue and a unit eigenvector for it.
    pub fn eig_min(&self) -> (f64, Vec<f64>) {
        let (values, mut vectors) = self.eigen();
        (values[0], vectors.swap_remove(0))
    }

    /// Whether a Cholesky factorization exists, i.e. the matrix is positive
    /// definite. Much cheaper than [`SymMat::eigen`].
    pub fn cholesky_succeeds(&self) -> bool {
        let n = self.dim;
        let mut l = [[0.0; MAX_DIM]; MAX_DIM];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            if d <= 0.0 || d.is_nan() {
                return false;
            }
            let d = d.sqrt();
            l[j][j] = d;
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                l[i][j] = s / d;
            }
        }
        true
    }

    /// The absolute eigenvalue floor `psd_tol · (1 + max|S_ij|)` used by [`SymMat::is_psd`].
    pub fn psd_floor(&self, tol: &TolerancePolicy) -> f64 {
        tol.psd_tol * (1.0 + self.max_abs())
    }

    pub fn is_psd(&self, tol: &TolerancePolicy) -> bool {
        self.eig_min().0 >= -self.psd_floor(tol)
    }
}

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual(s: &SymMat, value: f64, v: &[f64]) -> f64 {
        let sv = s.mul_vec(v);
        sv.iter().zip(v).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn packed_layout_roundtrips() {
        for dim in 1..=MAX_DIM {
            let m = SymMat::from_fn(dim, |i, j| (10 * i + j) as f64);
            for i in 0..dim {
                for j in i..dim {
                    assert_eq!(m.get(i, j), (10 * i + j) as f64);
                    assert_eq!(m.get(j, i), (10 * i + j) as f64);
                }
            }
            let mut seen: Vec<usize> = (0..dim).flat_map(|i| (i..dim).map(move |j| packed_index(dim, i, j))).collect();
            seen.sort();
            assert_eq!(seen, (0..dim * (dim + 1) / 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn identity_eig_min_is_one() {
        let (val, vec) = SymMat::identity(3).eig_min();
        assert!((val - 1.0).abs() < 1e-15);
        let n: f64 = vec.iter().map(|x| x * x).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_eig_min() {
        let (val, vec) = SymMat::diag(&[2.0, -1.0]).eig_min();
        assert_eq!(val, -1.0);
        assert!(vec[0].abs() < 1e-15 && (vec[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one_two_by_two() {
        let s = SymMat::from_rows(&[[1.0, 0.5], [0.5, 0.25]]);
        let (val, vec) = s.eig_min();
        assert!(val.abs() < 1e-15);
        // null vector of (1, 0.5)(1, 0.5)ᵀ is ±(-0.5, 1)/√1.25
        let expected = [-0.5 / 1.25f64.sqrt(), 1.0 / 1.25f64.sqrt()];
        let sign = vec[1].signum();
        assert!((sign * vec[0] - expected[0]).abs() < 1e-12);
        assert!((sign * vec[1] - expected[1]).abs() < 1e-12);
        assert!((expected[0] + 0.447).abs() < 1e-3 && (expected[1] - 0.894).abs() < 1e-3);
    }

    #[test]
    fn psd_examples() {
        let tol = TolerancePolicy::default();
        assert!(SymMat::zeros(4).is_psd(&tol));
        assert!(!SymMat::diag(&[1.0, -1e-3]).is_psd(&tol));
        assert!(SymMat::outer(&[1.0, 0.5]).is_psd(&tol));
    }

    #[test]
    fn cholesky_examples() {
        assert!(SymMat::identity(5).cholesky_succeeds());
        assert!(!SymMat::outer(&[1.0, 0.5]).cholesky_succeeds());
        assert!(SymMat::outer(&[1.0, 0.5]).shift(1e-12).cholesky_succeeds());
        assert!(!SymMat::diag(&[1.0, -1e-3]).cholesky_succeeds());
    }

    #[test]
    fn determinant_matches_eigen_product() {
        let s = SymMat::from_rows(&[[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]]);
        let (vals, _) = s.eigen();
        let prod: f64 = vals.iter().product();
        assert!((s.det() - prod).abs() < 1e-12);
    }

    /// Roots of the characteristic polynomial of a symmetric 2×2 matrix.
    fn char_roots_2(a: f64, b: f64, d: f64) -> f64 {
        let m = 0.5 * (a + d);
        let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        m - r
    }

    /// Smallest root of the characteristic polynomial of a symmetric 3×3
    /// matrix via the trigonometric form of the cubic.
    fn char_roots_3(m: &SymMat) -> f64 {
        let q = (m.get(0, 0) + m.get(1, 1) + m.get(2, 2)) / 3.0;
        let p1 = m.get(0, 1).powi(2) + m.get(0, 2).powi(2) + m.get(1, 2).powi(2);
        let p2 = (m.get(0, 0) - q).powi(2) + (m.get(1, 1) - q).powi(2) + (m.get(2, 2) - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        if p == 0.0 {
            return q;
        }
        let b = m.shift(-q).scale(1.0 / p);
        let r = (b.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
    }

    fn sym(dim: usize) -> impl Strategy<Value = SymMat> {
        prop::collection::vec(-1.0f64..1.0, dim * (dim + 1) / 2).prop_map(move |vals| {
            let mut it = vals.into_iter();
            SymMat::from_fn(dim, |_, _| it.next().unwrap())
        })
    }

    proptest! {
        #[test]
        fn eig_min_residual_is_tiny(dim in 1usize..=6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let s = SymMat::from_fn(dim, |_, _| rng.gen_range(-2.0..2.0));
            let (val, vec) = s.eig_min();
            prop_assert!(residual(&s, val, &vec) <= 1e-12 * (1.0 + s.norm()));
            let n: f64 = vec.iter().map(|x| x * x).sum();
            prop_assert!((n - 1.0).abs() < 1e-12);
            let (vals, _) = s.eigen();
            prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn shift_invariance(s in sym(5), c in -3.0f64..3.0) {
            let a = s.eig_min().0;
            let b = s.shift(c).eig_min().0;
            prop_assert!((a + c - b).abs() < 1e-12);
        }

        #[test]
        fn gram_matrices_are_psd(v in prop::collection::vec(-2.0f64..2.0, 1..=6)) {
            prop_assert!(SymMat::outer(&v).is_psd(&TolerancePolicy::default()));
        }

        #[test]
        fn cholesky_agrees_with_eigenvalues(s in sym(5), c in 0.0f64..4.0) {
            let s = s.shift(c);
            let e = s.eig_min().0;
            prop_assume!(e.abs() > 1e-9);
            prop_assert_eq!(s.cholesky_succeeds(), e > 0.0);
        }

        #[test]
        fn agrees_with_characteristic_polynomial_2(a in -1.0f64..1.0, b in -1.0f64..1.0, d in -1.0f64..1.0) {
            let s = SymMat::from_rows(&[[a, b], [b, d]]);
            prop_assert!((s.eig_min().0 - char_roots_2(a, b, d)).abs() < 1e-10);
        }

        #[test]
        fn agrees_with_characteristic_polynomial_3(s in sym(3)) {
            prop_assert!((s.eig_min().0 - char_roots_3(&s)).abs() < 1e-10);
        }
    }
}
