//! The single switching variable case: `conv{(x, x², y) : 0 ≤ x ≤ y, y ∈ {0,1}}`
//! equals `{(x, X, y) ∈ PER : y ≤ 1}`.
//!
//! Membership is a perspective-cone test. The module also assembles the 4×4
//! doubly nonnegative matrix obtained by relaxing `(1, x, s, t)(1, x, s, t)ᵀ`
//! with slack `s = y - x` and complement `t = 1 - y`; that matrix is DNN
//! exactly when the point is in the hull.

use crate::cones::{dnn4_contains, per_contains, PerPoint};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::smat::{SymMat, TolerancePolicy};

/// A point `(x1, X11, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1Point {
    pub x1: f64,
    pub x11: f64,
    pub y1: f64,
}

impl H1Point {
    pub fn new(x1: f64, x11: f64, y1: f64) -> Self {
        Self { x1, x11, y1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1Witness {
    pub s1: f64,
    pub t1: f64,
    pub z11: f64,
    pub s11: f64,
    pub w: SymMat,
}

impl H1Witness {
    /// Residuals of `x1 + s1 + t1 = 1`, `X11 + Z11 = x1`, `S11 + Z11 = s1`.
    pub fn identity_residuals(&self, p: &H1Point) -> [f64; 3] {
        [p.x1 + self.s1 + self.t1 - 1.0, p.x11 + self.z11 - p.x1, self.s11 + self.z11 - self.s1]
    }
}

/// Hull membership. The report separates the conic perspective inequality
/// from the ordering constraints and the bound `y1 <= 1`.
pub fn h1_contains(p: &H1Point, tol: &TolerancePolicy) -> Report {
    let mut r = per_contains(&PerPoint::new(p.x1, p.x11, p.y1), tol);
    r.push("y1 <= 1", 1.0 - p.y1, tol.eq_tol);
    r
}

/// Assembles the witness matrix for any point, member or not.
pub fn h1_witness_unchecked(p: &H1Point) -> H1Witness {
    let t1 = 1.0 - p.y1;
    let s1 = p.y1 - p.x1;
    let z11 = p.x1 - p.x11;
    let s11 = p.y1 + p.x11 - 2.0 * p.x1;
    let w = SymMat::from_rows(&[
        [1.0, p.x1, s1, t1],
        [p.x1, p.x11, z11, 0.0],
        [s1, z11, s11, 0.0],
        [t1, 0.0, 0.0, t1],
    ]);
    H1Witness { s1, t1, z11, s11, w }
}

/// The DNN witness for a hull member; rejects non-members with the failing
/// conditions.
pub fn h1_witness(p: &H1Point, tol: &TolerancePolicy) -> Result<H1Witness> {
    let r = h1_contains(p, tol);
    if !r.passed() {
        return Err(Error::NotMember(r));
    }
    Ok(h1_witness_unchecked(p))
}

/// DNN feasibility of the assembled witness.
pub fn witness_is_dnn(p: &H1Point, tol: &TolerancePolicy) -> bool {
    dnn4_contains(&h1_witness_unchecked(p).w, tol).passed()
}
