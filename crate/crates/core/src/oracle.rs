//! Exact support function of the nonconvex set
//! `{(x, xxᵀ, y, y1 y2) : 0 ≤ x ≤ y ∈ {0,1}²}`.
//!
//! The support of a convex hull is the maximum over its generators, so it
//! suffices to maximize a box-constrained quadratic for each of the four
//! values of `y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull2::{Atom, HullPoint, YBits};
use crate::smat::SymMat;

/// `c_xᵀx + ⟨Q, X⟩ + c_yᵀy + c_Y Y12`. Lift variables carry no cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub c_x: [f64; 2],
    /// `(Q11, Q12, Q22)`; the `X12` coefficient is `2 Q12`.
    pub q: [f64; 3],
    pub c_y: [f64; 2],
    pub c_y12: f64,
}

impl Objective {
    pub const ZERO: Objective = Objective { c_x: [0.0; 2], q: [0.0; 3], c_y: [0.0; 2], c_y12: 0.0 };

    /// Coefficients in the order `c_x1, c_x2, Q11, Q12, Q22, c_y1, c_y2, c_Y`.
    pub fn from_coeffs(c: [f64; 8]) -> Self {
        Self { c_x: [c[0], c[1]], q: [c[2], c[3], c[4]], c_y: [c[5], c[6]], c_y12: c[7] }
    }

    pub fn coeffs(&self) -> [f64; 8] {
        [self.c_x[0], self.c_x[1], self.q[0], self.q[1], self.q[2], self.c_y[0], self.c_y[1], self.c_y12]
    }

    pub fn qmat(&self) -> SymMat {
        SymMat::from_rows(&[[self.q[0], self.q[1]], [self.q[1], self.q[2]]])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_coeffs(self.coeffs().map(|c| s * c))
    }

    /// Gradient with respect to `(x1, x2, X11, X12, X22, y1, y2, Y12)`.
    pub fn gradient(&self) -> [f64; 8] {
        let c = self.coeffs();
        [c[0], c[1], c[2], 2.0 * c[3], c[4], c[5], c[6], c[7]]
    }

    pub fn value(&self, p: &HullPoint) -> f64 {
        self.gradient().iter().zip(p.to_array()).map(|(g, v)| g * v).sum()
    }
}

fn quad_value(c: [f64; 2], q: &SymMat, x: [f64; 2]) -> f64 {
    c[0] * x[0] + c[1] * x[1] + q.quad_form(&x)
}

/// Exact maximum of `cᵀx + xᵀQx` over `[0, ub1] × [0, ub2]` by enumerating
/// the faces of the box.
///
/// When `2Q` is singular the interior candidate is skipped: along a null
/// direction the objective is affine, so some maximizer lies on the boundary,
/// which the edges and vertices cover.
pub fn max_quad_box(c: [f64; 2], q: &SymMat, ub: [f64; 2]) -> (f64, [f64; 2]) {
    assert!(ub[0] >= 0.0 && ub[1] >= 0.0, "box bounds must be nonnegative");
    let (q11, q12, q22) = (q.get(0, 0), q.get(0, 1), q.get(1, 1));
    let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
    let mut consider = |x: [f64; 2]| {
        let v = quad_value(c, q, x);
        if v > best.0 {
            best = (v, x);
        }
    };
    for a in [0.0, ub[0]] {
        for b in [0.0, ub[1]] {
            consider([a, b]);
        }
    }
    // x1 fixed: (c2 + 2 Q12 x1) x2 + Q22 x2²
    for a in [0.0, ub[0]] {
        if q22 != 0.0 {
            let t = -(c[1] + 2.0 * q12 * a) / (2.0 * q22);
            if (0.0..=ub[1]).contains(&t) {
                consider([a, t]);
            }
        }
    }
    for b in [0.0, ub[1]] {
        if q11 != 0.0 {
            let t = -(c[0] + 2.0 * q12 * b) / (2.0 * q11);
            if (0.0..=ub[0]).contains(&t) {
                consider([t, b]);
            }
        }
    }
    let det = 4.0 * (q11 * q22 - q12 * q12);
    let scale = 1.0f64.max(q.max_abs() * q.max_abs());
    if det.abs() > 1e-12 * scale {
        // 2Qx = -c
        let x1 = (-c[0] * 2.0 * q22 + c[1] * 2.0 * q12) / det;
        let x2 = (-c[1] * 2.0 * q11 + c[0] * 2.0 * q12) / det;
        if (0.0..=ub[0]).contains(&x1) && (0.0..=ub[1]).contains(&x2) {
            consider([x1, x2]);
        }
    }
    best
}

/// Support of the hull in direction `obj`, with a maximizing generator.
///
/// `restrict_y` asserts that the objective ignores `Y12`.
pub fn support_atoms(obj: &Objective, restrict_y: bool) -> Result<(f64, Atom)> {
    if !obj.is_finite() {
        return Err(Error::Invalid("objective has non-finite coefficients".into()));
    }
    if restrict_y && obj.c_y12 != 0.0 {
        return Err(Error::Invalid(format!("c_Y = {} but the objective must ignore Y12", obj.c_y12)));
    }
    let q = obj.qmat();
    let mut best: Option<(f64, Atom)> = None;
    for yb in YBits::ALL {
        let y = yb.y();
        let (v, x) = max_quad_box(obj.c_x, &q, y);
        let v = v + obj.c_y[0] * y[0] + obj.c_y[1] * y[1] + obj.c_y12 * y[0] * y[1];
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, Atom::new(yb, x)?));
        }
    }
    Ok(best.expect("four candidates"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent check: a 201×201 grid followed by local zooming around
    /// the best grid points.
    pub(crate) fn grid_max(c: [f64; 2], q: &SymMat, ub: [f64; 2], n: usize) -> f64 {
        let f = |x: [f64; 2]| quad_value(c, q, x);
        let mut cands: Vec<(f64, [f64; 2])> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = [ub[0] * i as f64 / (n - 1) as f64, ub[1] * j as f64 / (n - 1) as f64];
                cands.push((f(x), x));
            }
        }
        cands.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = cands[0].0;
        for &(_, start) in cands.iter().take(4) {
            let mut centre = start;
            let mut h = [ub[0] / (n - 1) as f64, ub[1] / (n - 1) as f64];
            for _ in 0..40 {
                let mut local = (f(centre), centre);
                for i in -4..=4 {
                    for j in -4..=4 {
                        let x = [
                            (centre[0] + h[0] * i as f64 / 4.0).clamp(0.0, ub[0]),
                            (centre[1] + h[1] * j as f64 / 4.0).clamp(0.0, ub[1]),
                        ];
                        let v = f(x);
                        if v > local.0 {
                            local = (v, x);
                        }
                    }
                }
                centre = local.1;
                best = best.max(local.0);
                h = [h[0] * 0.5, h[1] * 0.5];
            }
        }
        best
    }

    #[test]
    fn max_quad_box_examples() {
        let (v, x) = max_quad_box([1.0, 1.0], &SymMat::zeros(2), [1.0, 1.0]);
        assert_eq!((v, x), (2.0, [1.0, 1.0]));
        let (v, x) = max_quad_box([1.0, 1.0], &SymMat::identity(2).scale(-1.0), [1.0, 1.0]);
        assert!((v - 0.5).abs() < 1e-15 && (x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
        assert!((grid_max([1.0, 1.0], &SymMat::identity(2).scale(-1.0), [1.0, 1.0], 201) - 0.5).abs() < 1e-9);
        let q = SymMat::from_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(max_quad_box([0.0, 0.0], &q, [1.0, 1.0]), (2.0, [1.0, 1.0]));
    }

    #[test]
    fn degenerate_boxes() {
        let q = SymMat::from_rows(&[[-1.0, 0.3], [0.3, 0.5]]);
        assert_eq!(max_quad_box([1.0, 1.0], &q, [0.0, 0.0]), (0.0, [0.0, 0.0]));
        let (v, x) = max_quad_box([1.0, 1.0], &q, [1.0, 0.0]);
        assert!((v - 0.25).abs() < 1e-15 && x == [0.5, 0.0]);
    }

    #[test]
    fn support_examples() {
        let obj = Objective { c_x: [1.0, 0.0], c_y12: -1.0, ..Objective::ZERO };
        let (v, a) = support_atoms(&obj, false).unwrap();
        assert_eq!((v, a.ybits, a.x), (1.0, YBits::E1, [1.0, 0.0]));

        let obj = Objective { q: [1.0, 0.0, 1.0], ..Objective::ZERO };
        let (v, a) = support_atoms(&obj, false).unwrap();
        assert_eq!((v, a.ybits, a.x), (2.0, YBits::E, [1.0, 1.0]));

        let obj = Objective { c_y: [-1.0, -1.0], ..Objective::ZERO };
        let (v, a) = support_atoms(&obj, false).unwrap();
        assert_eq!((v, a.ybits), (0.0, YBits::Zero));

        assert!(support_atoms(&Objective { c_y12: 1.0, ..Objective::ZERO }, true).is_err());
    }

    #[test]
    fn value_at_argmax_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..500 {
            let obj = Objective::from_coeffs(std::array::from_fn(|_| rng.gen_range(-1.0..=1.0)));
            let (v, a) = support_atoms(&obj, false).unwrap();
            assert!((obj.value(&a.point()) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn face_enumeration_matches_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let c = [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)];
            let q = SymMat::from_rows(&[
                [rng.gen_range(-1.0..=1.0), 0.0],
                [0.0, rng.gen_range(-1.0..=1.0)],
            ]);
            let mut q = q;
            q.set(0, 1, rng.gen_range(-1.0..=1.0));
            let (v, _) = max_quad_box(c, &q, [1.0, 1.0]);
            let g = grid_max(c, &q, [1.0, 1.0], 201);
            assert!((v - g).abs() <= 1e-6 && v >= g - 1e-12, "{v} vs {g}");
        }
    }

    proptest! {
        #[test]
        fn support_is_positively_homogeneous(
            c in prop::array::uniform8(-1.0f64..1.0),
            s in 0.01f64..10.0,
        ) {
            let obj = Objective::from_coeffs(c);
            let (v, _) = support_atoms(&obj, false).unwrap();
            let (w, _) = support_atoms(&obj.scaled(s), false).unwrap();
            prop_assert!((w - s * v).abs() <= 1e-12 * (1.0 + s));
        }

        #[test]
        fn support_dominates_random_atoms(c in prop::array::uniform8(-1.0f64..1.0), seed in any::<u64>()) {
            let obj = Objective::from_coeffs(c);
            let (v, _) = support_atoms(&obj, false).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                let yb = YBits::ALL[rng.gen_range(0..4)];
                let y = yb.y();
                let a = Atom::new(yb, [rng.gen::<f64>() * y[0], rng.gen::<f64>() * y[1]]).unwrap();
                prop_assert!(obj.value(&a.point()) <= v + 1e-12);
            }
        }
    }
}
