//! Elementary convex sets: the perspective cone, the two RLT sets, and the
//! 4×4 doubly nonnegative cone.

use crate::report::Report;
use crate::smat::{SymMat, TolerancePolicy};

/// A point `(α, β, γ)` tested against `α² ≤ βγ, 0 ≤ β ≤ α ≤ γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerPoint {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PerPoint {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }
}

/// The bordered matrix `(λ, xᵀ; x, X)` with `X` 2×2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RltxMat {
    pub lambda: f64,
    pub x: [f64; 2],
    pub xx: SymMat,
}

impl RltxMat {
    pub fn new(lambda: f64, x: [f64; 2], xx: SymMat) -> Self {
        assert_eq!(xx.dim(), 2);
        Self { lambda, x, xx }
    }

    /// Reads `(λ, xᵀ; x, X)` out of a 3×3 bordered matrix.
    pub fn from_bordered(m: &SymMat) -> Self {
        assert_eq!(m.dim(), 3);
        Self {
            lambda: m.get(0, 0),
            x: [m.get(0, 1), m.get(0, 2)],
            xx: SymMat::from_fn(2, |i, j| m.get(i + 1, j + 1)),
        }
    }

    pub fn bordered(&self) -> SymMat {
        SymMat::from_rows(&[
            [self.lambda, self.x[0], self.x[1]],
            [self.x[0], self.xx.get(0, 0), self.xx.get(0, 1)],
            [self.x[1], self.xx.get(0, 1), self.xx.get(1, 1)],
        ])
    }
}

/// `(y, Y12)` tested against the McCormick envelope of `y1 y2` over `[0,1]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RltyPoint {
    pub y: [f64; 2],
    pub y12: f64,
}

impl RltyPoint {
    pub fn new(y: [f64; 2], y12: f64) -> Self {
        Self { y, y12 }
    }
}

pub fn per_contains(p: &PerPoint, tol: &TolerancePolicy) -> Report {
    let e = tol.eq_tol;
    let mut r = Report::new();
    r.push("PER conic: alpha^2 <= beta*gamma", p.beta * p.gamma - p.alpha * p.alpha, e);
    r.push("PER order: beta >= 0", p.beta, e);
    r.push("PER order: beta <= alpha", p.alpha - p.beta, e);
    r.push("PER order: alpha <= gamma", p.gamma - p.alpha, e);
    r
}

pub fn rltx_contains(m: &RltxMat, tol: &TolerancePolicy) -> Report {
    let e = tol.eq_tol;
    let (x1, x2) = (m.x[0], m.x[1]);
    let (d1, x12, d2) = (m.xx.get(0, 0), m.xx.get(0, 1), m.xx.get(1, 1));
    let mut r = Report::new();
    r.push("RLT_x: lambda >= 0", m.lambda, e);
    r.push("RLT_x: X11 >= 0", d1, e);
    r.push("RLT_x: X22 >= 0", d2, e);
    r.push("RLT_x: X11 <= x1", x1 - d1, e);
    r.push("RLT_x: X22 <= x2", x2 - d2, e);
    r.push("RLT_x: X12 >= 0", x12, e);
    r.push("RLT_x: X12 >= x1 + x2 - lambda", x12 - (x1 + x2 - m.lambda), e);
    r.push("RLT_x: X12 <= x1", x1 - x12, e);
    r.push("RLT_x: X12 <= x2", x2 - x12, e);
    r
}

pub fn rlty_contains(p: &RltyPoint, tol: &TolerancePolicy) -> Report {
    let e = tol.eq_tol;
    let mut r = Report::new();
    r.push("RLT_y: Y12 >= 0", p.y12, e);
    r.push("RLT_y: Y12 >= y1 + y2 - 1", p.y12 - (p.y[0] + p.y[1] - 1.0), e);
    r.push("RLT_y: Y12 <= y1", p.y[0] - p.y12, e);
    r.push("RLT_y: Y12 <= y2", p.y[1] - p.y12, e);
    r
}

/// Semidefinite condition as a slack entry.
pub fn psd_report(name: &str, m: &SymMat, tol: &TolerancePolicy) -> Report {
    let mut r = Report::new();
    r.push(name, m.eig_min().0, m.psd_floor(tol));
    r
}

pub fn dnn4_contains(w: &SymMat, tol: &TolerancePolicy) -> Report {
    assert_eq!(w.dim(), 4, "DNN test is for 4x4 matrices");
    let mut r = Report::new();
    r.push("DNN: entrywise nonnegative", w.min_entry(), tol.eq_tol);
    r.extend(psd_report("DNN: PSD", w, tol));
    r
}
