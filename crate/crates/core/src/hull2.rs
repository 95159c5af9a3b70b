//! Two switching variables: the moment point `(x, X, y, Y12)`, its lifts with
//! auxiliary `(α, β)`, and every constraint system that describes
//! `conv{(x, xxᵀ, y, y1 y2) : 0 ≤ x ≤ y ∈ {0,1}²}`.
//!
//! The systems, from largest to smallest lifted description:
//!
//! * [`System::Disjunctive`]: `x ≤ y`, `M(β) ∈ PSD ∩ RLT_x`,
//!   `(α_j, β_j, y_j - Y12) ∈ PER`, `(y, Y12) ∈ RLT_y`.
//! * [`System::NoBeta`]: the linear conditions plus `M(β_pq) ⪰ 0` for the
//!   four closed-form choices of `β`.
//! * [`System::Minimal`]: the linear conditions plus the 5×5 condition only.
//! * [`System::Conjecture`]: the linear conditions plus the natural 5×5 PSD
//!   condition written in `t = e - y`, which is weaker than the 5×5 above.
//!
//! Here `M(β) = (Y12, (x - α)ᵀ; x - α, X - Diag(β))`.

use std::fmt;
use std::str::FromStr;

use crate::cones::{per_contains, psd_report, rltx_contains, rlty_contains, PerPoint, RltxMat, RltyPoint};
use crate::error::{Error, Result};
use crate::hull1::{h1_contains, H1Point};
use crate::report::Report;
use crate::smat::{SymMat, TolerancePolicy};

/// A candidate point `(x, X, y, Y12)` of the hull.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HullPoint {
    pub x: [f64; 2],
    /// `X11`
    pub x11: f64,
    /// `X12`
    pub x12: f64,
    /// `X22`
    pub x22: f64,
    pub y: [f64; 2],
    /// `Y12`
    pub y12: f64,
}

impl HullPoint {
    pub fn xjj(&self, j: usize) -> f64 {
        match j {
            0 => self.x11,
            1 => self.x22,
            _ => panic!("index {j} out of range"),
        }
    }

    pub fn xmat(&self) -> SymMat {
        SymMat::from_rows(&[[self.x11, self.x12], [self.x12, self.x22]])
    }

    /// `(1, xᵀ; x, X)`.
    pub fn moment_matrix(&self) -> SymMat {
        SymMat::from_rows(&[
            [1.0, self.x[0], self.x[1]],
            [self.x[0], self.x11, self.x12],
            [self.x[1], self.x12, self.x22],
        ])
    }

    /// `y_j - Y12`.
    pub fn gamma(&self, j: usize) -> f64 {
        self.y[j] - self.y12
    }

    pub fn to_array(&self) -> [f64; 8] {
        [self.x[0], self.x[1], self.x11, self.x12, self.x22, self.y[0], self.y[1], self.y12]
    }

    pub fn from_array(v: &[f64; 8]) -> Self {
        Self { x: [v[0], v[1]], x11: v[2], x12: v[3], x22: v[4], y: [v[5], v[6]], y12: v[7] }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// A hull point together with the auxiliary variables of the lifted systems.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LiftedPoint {
    pub base: HullPoint,
    pub alpha: [f64; 2],
    pub beta: Option<[f64; 2]>,
}

impl LiftedPoint {
    pub fn new(base: HullPoint, alpha: [f64; 2]) -> Self {
        Self { base, alpha, beta: None }
    }

    pub fn with_beta(mut self, beta: [f64; 2]) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_alpha(mut self, alpha: [f64; 2]) -> Self {
        self.alpha = alpha;
        self
    }

    /// Exchanges the roles of the two coordinates. `X12` and `Y12` are fixed.
    /// This is an involution.
    pub fn swapped(&self) -> Self {
        let b = &self.base;
        Self {
            base: HullPoint { x: [b.x[1], b.x[0]], x11: b.x22, x12: b.x12, x22: b.x11, y: [b.y[1], b.y[0]], y12: b.y12 },
            alpha: [self.alpha[1], self.alpha[0]],
            beta: self.beta.map(|b| [b[1], b[0]]),
        }
    }

    /// Convex (or conic) combination `Σ w_i z_i`. `β` is kept only if every
    /// part carries one.
    pub fn combine(parts: &[(f64, LiftedPoint)]) -> Self {
        let mut out = [0.0; 12];
        let mut has_beta = true;
        for (w, z) in parts {
            let a = z.base.to_array();
            for k in 0..8 {
                out[k] += w * a[k];
            }
            out[8] += w * z.alpha[0];
            out[9] += w * z.alpha[1];
            match z.beta {
                Some(b) => {
                    out[10] += w * b[0];
                    out[11] += w * b[1];
                }
                None => has_beta = false,
            }
        }
        let mut base = [0.0; 8];
        base.copy_from_slice(&out[..8]);
        Self {
            base: HullPoint::from_array(&base),
            alpha: [out[8], out[9]],
            beta: has_beta.then_some([out[10], out[11]]),
        }
    }
}

/// The four values of `y ∈ {0,1}²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YBits {
    Zero,
    E1,
    E2,
    E,
}

impl YBits {
    pub const ALL: [YBits; 4] = [YBits::Zero, YBits::E1, YBits::E2, YBits::E];

    pub fn y(self) -> [f64; 2] {
        match self {
            YBits::Zero => [0.0, 0.0],
            YBits::E1 => [1.0, 0.0],
            YBits::E2 => [0.0, 1.0],
            YBits::E => [1.0, 1.0],
        }
    }
}

/// A generator `(x, xxᵀ, y, y1 y2)` of the hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub ybits: YBits,
    pub x: [f64; 2],
}

impl Atom {
    pub fn new(ybits: YBits, x: [f64; 2]) -> Result<Self> {
        let y = ybits.y();
        for j in 0..2 {
            if !(0.0..=y[j]).contains(&x[j]) {
                return Err(Error::Invalid(format!("atom x{} = {} outside [0, {}]", j + 1, x[j], y[j])));
            }
        }
        Ok(Self { ybits, x })
    }

    pub fn point(&self) -> HullPoint {
        let [x1, x2] = self.x;
        let y = self.ybits.y();
        HullPoint { x: self.x, x11: x1 * x1, x12: x1 * x2, x22: x2 * x2, y, y12: y[0] * y[1] }
    }
}

/// Lifts an atom into the disjunctive system: `(α, β) = (x_j e_j, x_j² e_j)`
/// when `y = e_j`, and zero otherwise.
pub fn atom_lift(a: &Atom) -> LiftedPoint {
    let (alpha, beta) = match a.ybits {
        YBits::Zero | YBits::E => ([0.0, 0.0], [0.0, 0.0]),
        YBits::E1 => ([a.x[0], 0.0], [a.x[0] * a.x[0], 0.0]),
        YBits::E2 => ([0.0, a.x[1]], [0.0, a.x[1] * a.x[1]]),
    };
    LiftedPoint { base: a.point(), alpha, beta: Some(beta) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    Disjunctive,
    NoBeta,
    Minimal,
    Conjecture,
}

impl System {
    pub const ALL: [System; 4] = [System::Disjunctive, System::NoBeta, System::Minimal, System::Conjecture];

    pub fn name(self) -> &'static str {
        match self {
            System::Disjunctive => "disj",
            System::NoBeta => "nobeta",
            System::Minimal => "minimal",
            System::Conjecture => "conjecture",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disj" | "disjunctive" => Ok(System::Disjunctive),
            "nobeta" => Ok(System::NoBeta),
            "minimal" => Ok(System::Minimal),
            "conjecture" => Ok(System::Conjecture),
            other => Err(Error::Invalid(format!("unknown system '{other}'"))),
        }
    }
}

/// The four semidefinite conditions of the `β`-free system.
///
/// `FourFirst` is the condition whose Schur form borders with `y1 - Y12` and
/// `α1`, i.e. `M(β)` with `β = (α1² / (y1 - Y12), X22 - x2 + α2)`, which is
/// `β_21` in the `β_pq` labelling. `FourSecond` is the mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsdCondition {
    ThreeByThree,
    FourFirst,
    FourSecond,
    FiveByFive,
}

impl PsdCondition {
    pub const ALL: [PsdCondition; 4] =
        [PsdCondition::ThreeByThree, PsdCondition::FourFirst, PsdCondition::FourSecond, PsdCondition::FiveByFive];

    /// The `(p, q)` label of the `β` choice for this condition.
    pub fn beta_label(self) -> (usize, usize) {
        match self {
            PsdCondition::ThreeByThree => (1, 1),
            PsdCondition::FourFirst => (2, 1),
            PsdCondition::FourSecond => (1, 2),
            PsdCondition::FiveByFive => (2, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PsdCondition::ThreeByThree => "3x3",
            PsdCondition::FourFirst => "4x4first",
            PsdCondition::FourSecond => "4x4second",
            PsdCondition::FiveByFive => "5x5",
        }
    }
}

/// `M(β) = (Y12, (x - α)ᵀ; x - α, X - Diag(β))`.
pub fn build_m(z: &LiftedPoint, beta: [f64; 2]) -> SymMat {
    let b = &z.base;
    let u = [b.x[0] - z.alpha[0], b.x[1] - z.alpha[1]];
    SymMat::from_rows(&[[b.y12, u[0], u[1]], [u[0], b.x11 - beta[0], b.x12], [u[1], b.x12, b.x22 - beta[1]]])
}

/// `α_j² / (y_j - Y12)` with `0/0 := 0`.
pub fn perspective_quotient(z: &LiftedPoint, j: usize, tol: &TolerancePolicy) -> Result<f64> {
    let gap = z.base.gamma(j);
    let a = z.alpha[j];
    if gap.abs() <= tol.eq_tol {
        if a.abs() <= tol.eq_tol {
            Ok(0.0)
        } else {
            Err(Error::DegenerateLift { j: j + 1, gap, alpha: a })
        }
    } else {
        Ok(a * a / gap)
    }
}

/// The closed-form `β_pq`: component `j` is `X_jj - x_j + α_j` when its label
/// is 1 and `α_j² / (y_j - Y12)` when its label is 2.
pub fn beta_pq(z: &LiftedPoint, p: usize, q: usize, tol: &TolerancePolicy) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (j, label) in [p, q].into_iter().enumerate() {
        out[j] = match label {
            1 => z.base.xjj(j) - z.base.x[j] + z.alpha[j],
            2 => perspective_quotient(z, j, tol)?,
            _ => return Err(Error::Invalid(format!("beta label {label} not in {{1, 2}}"))),
        };
    }
    Ok(out)
}

/// `max{α_j² / (y_j - Y12), X_jj - x_j + α_j}` componentwise: the smallest
/// `β` the disjunctive system admits for fixed `(x, X, y, Y12, α)`.
pub fn minimal_beta(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<[f64; 2]> {
    let a = beta_pq(z, 1, 1, tol)?;
    let b = beta_pq(z, 2, 2, tol)?;
    Ok([a[0].max(b[0]), a[1].max(b[1])])
}

/// The Schur-complement form of a condition: affine in the lifted point.
pub fn primed(z: &LiftedPoint, cond: PsdCondition) -> SymMat {
    let b = &z.base;
    let [a1, a2] = z.alpha;
    let (g1, g2) = (b.gamma(0), b.gamma(1));
    let (u1, u2) = (b.x[0] - a1, b.x[1] - a2);
    match cond {
        PsdCondition::ThreeByThree => SymMat::from_rows(&[[b.y12, u1, u2], [u1, u1, b.x12], [u2, b.x12, u2]]),
        PsdCondition::FourFirst => SymMat::from_rows(&[
            [g1, 0.0, a1, 0.0],
            [0.0, b.y12, u1, u2],
            [a1, u1, b.x11, b.x12],
            [0.0, u2, b.x12, u2],
        ]),
        PsdCondition::FourSecond => SymMat::from_rows(&[
            [g2, 0.0, 0.0, a2],
            [0.0, b.y12, u1, u2],
            [0.0, u1, u1, b.x12],
            [a2, u2, b.x12, b.x22],
        ]),
        PsdCondition::FiveByFive => SymMat::from_rows(&[
            [g1, 0.0, 0.0, a1, 0.0],
            [0.0, g2, 0.0, 0.0, a2],
            [0.0, 0.0, b.y12, u1, u2],
            [a1, 0.0, u1, b.x11, b.x12],
            [0.0, a2, u2, b.x12, b.x22],
        ]),
    }
}

/// `M(β_pq)` for the given condition.
pub fn condition_matrix(z: &LiftedPoint, cond: PsdCondition, tol: &TolerancePolicy) -> Result<SymMat> {
    let (p, q) = cond.beta_label();
    Ok(build_m(z, beta_pq(z, p, q, tol)?))
}

/// The linear part of the `β`-free systems: `diag(X) ≤ x ≤ y`, the bounds on
/// `X12` in terms of `x - α`, `0 ≤ α_j ≤ y_j - Y12`, and `(y, Y12) ∈ RLT_y`.
pub fn linear_conditions(z: &LiftedPoint, tol: &TolerancePolicy) -> Report {
    let e = tol.eq_tol;
    let b = &z.base;
    let [a1, a2] = z.alpha;
    let (u1, u2) = (b.x[0] - a1, b.x[1] - a2);
    let mut r = Report::new();
    r.push("X11 <= x1", b.x[0] - b.x11, e);
    r.push("X22 <= x2", b.x[1] - b.x22, e);
    r.push("x1 <= y1", b.y[0] - b.x[0], e);
    r.push("x2 <= y2", b.y[1] - b.x[1], e);
    r.push("X12 >= 0", b.x12, e);
    r.push("X12 >= x1-a1+x2-a2-Y12", b.x12 - (u1 + u2 - b.y12), e);
    r.push("X12 <= x1-a1", u1 - b.x12, e);
    r.push("X12 <= x2-a2", u2 - b.x12, e);
    r.push("a1 >= 0", a1, e);
    r.push("a2 >= 0", a2, e);
    r.push("a1 <= y1-Y12", b.gamma(0) - a1, e);
    r.push("a2 <= y2-Y12", b.gamma(1) - a2, e);
    r.extend(rlty_contains(&RltyPoint::new(b.y, b.y12), tol));
    r
}

/// The matrices of the `t = e - y` description. `strengthened` is congruent to
/// the 5×5 Schur form; `original` is the natural moment-matrix condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TMatrices {
    pub t: [f64; 2],
    pub t12: f64,
    pub strengthened: SymMat,
    pub original: SymMat,
}

impl TMatrices {
    /// `max |strengthened - (original - T12 u uᵀ)|` with `u = (1,0,0,1,1)`.
    pub fn correction_residual(&self) -> f64 {
        let u = [1.0, 0.0, 0.0, 1.0, 1.0];
        self.original.sub(&SymMat::outer(&u).scale(self.t12)).sub(&self.strengthened).max_abs()
    }
}

pub fn t_matrices(z: &LiftedPoint) -> TMatrices {
    let b = &z.base;
    let [a1, a2] = z.alpha;
    let [x1, x2] = b.x;
    let t = [1.0 - b.y[0], 1.0 - b.y[1]];
    let t12 = 1.0 + b.y12 - b.y[0] - b.y[1];
    let original = SymMat::from_rows(&[
        [1.0, x1, x2, t[0], t[1]],
        [x1, b.x11, b.x12, 0.0, a1],
        [x2, b.x12, b.x22, a2, 0.0],
        [t[0], 0.0, a2, t[0], t12],
        [t[1], a1, 0.0, t12, t[1]],
    ]);
    let (s1, s2) = (t[0] - t12, t[1] - t12);
    let strengthened = SymMat::from_rows(&[
        [1.0 - t12, x1, x2, s1, s2],
        [x1, b.x11, b.x12, 0.0, a1],
        [x2, b.x12, b.x22, a2, 0.0],
        [s1, 0.0, a2, s1, 0.0],
        [s2, a1, 0.0, 0.0, s2],
    ]);
    let out = TMatrices { t, t12, strengthened, original };
    debug_assert!(out.correction_residual() <= 1e-14);
    out
}

/// Result of [`check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub system: System,
    pub report: Report,
    /// Conditions where `M(β_pq)` and its Schur form disagree well beyond
    /// tolerance. Always empty unless something is wrong.
    pub schur_mismatches: Vec<PsdCondition>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

fn psd_verdicts_disagree(a: &SymMat, b: &SymMat, tol: &TolerancePolicy) -> bool {
    let (ea, eb) = (a.eig_min().0, b.eig_min().0);
    let (fa, fb) = (a.psd_floor(tol), b.psd_floor(tol));
    (ea >= -fa && eb < -100.0 * fb) || (eb >= -fb && ea < -100.0 * fa)
}

/// Evaluates one of the representation systems at `z`.
pub fn check(z: &LiftedPoint, system: System, tol: &TolerancePolicy) -> Result<CheckReport> {
    let mut schur_mismatches = Vec::new();
    let report = match system {
        System::Disjunctive => {
            let beta = z
                .beta
                .ok_or_else(|| Error::Precondition("the disjunctive system needs beta".into()))?;
            disjunctive_report(z, beta, tol)
        }
        System::NoBeta => {
            let mut r = linear_conditions(z, tol);
            for cond in PsdCondition::ALL {
                let (p, q) = cond.beta_label();
                let m = condition_matrix(z, cond, tol)?;
                let s = primed(z, cond);
                r.extend(psd_report(&format!("({}) M(beta_{p}{q}) PSD", cond.name()), &m, tol));
                if psd_verdicts_disagree(&m, &s, tol) {
                    schur_mismatches.push(cond);
                }
            }
            r
        }
        System::Minimal => {
            let mut r = linear_conditions(z, tol);
            r.extend(psd_report("(5x5') PSD", &primed(z, PsdCondition::FiveByFive), tol));
            r
        }
        System::Conjecture => {
            let mut r = linear_conditions(z, tol);
            r.extend(psd_report("(t-space natural 5x5) PSD", &t_matrices(z).original, tol));
            r
        }
    };
    Ok(CheckReport { system, report, schur_mismatches })
}

fn disjunctive_report(z: &LiftedPoint, beta: [f64; 2], tol: &TolerancePolicy) -> Report {
    let b = &z.base;
    let mut r = Report::new();
    r.push("x1 <= y1", b.y[0] - b.x[0], tol.eq_tol);
    r.push("x2 <= y2", b.y[1] - b.x[1], tol.eq_tol);
    let m = build_m(z, beta);
    r.extend(psd_report("M(beta) PSD", &m, tol));
    r.extend(rltx_contains(&RltxMat::from_bordered(&m), tol).prefixed("M(beta) "));
    for j in 0..2 {
        let per = PerPoint::new(z.alpha[j], beta[j], b.gamma(j));
        r.extend(per_contains(&per, tol).prefixed(&format!("j={}: ", j + 1)));
    }
    r.extend(rlty_contains(&RltyPoint::new(b.y, b.y12), tol));
    r
}

/// How the weights of the four `y`-blocks are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaRule {
    /// `λ_{e2} = y2 - Y12`, which makes the weights sum to one.
    Corrected,
    /// `λ_{e2} = y1 - Y12`, kept to demonstrate that it breaks the decomposition.
    Literal,
}

/// `(1, xᵀ; x, X) = Σ_y λ_y Z_y` with each `Z_y` in the hull for fixed `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Weights for `y = 0, e1, e2, e`.
    pub lambdas: [f64; 4],
    /// Normalized blocks for `y = 0, e1, e2, e`.
    pub blocks: [SymMat; 4],
    /// Max-abs residual of the reconstruction of `(1, xᵀ; x, X)` and `(y, Y12)`.
    pub residual: f64,
    pub report: Report,
}

/// Below this weight a block is tested in homogeneous form instead of after
/// dividing by its weight.
const NORMALIZE_MIN_WEIGHT: f64 = 1e-6;

pub fn decompose(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<Decomposition> {
    decompose_with(z, LambdaRule::Corrected, tol)
}

pub fn decompose_with(z: &LiftedPoint, rule: LambdaRule, tol: &TolerancePolicy) -> Result<Decomposition> {
    let pre = check(z, System::Disjunctive, tol)?;
    if !pre.passed() {
        return Err(Error::Precondition(format!("point is not disjunctive-feasible: {}", pre.report)));
    }
    let beta = z.beta.expect("checked above");
    let b = &z.base;
    let lambdas = [
        1.0 - b.y[0] - b.y[1] + b.y12,
        b.y[0] - b.y12,
        match rule {
            LambdaRule::Corrected => b.y[1] - b.y12,
            LambdaRule::Literal => b.y[0] - b.y12,
        },
        b.y12,
    ];
    let [a1, a2] = z.alpha;
    let numerators = [
        SymMat::diag(&[lambdas[0], 0.0, 0.0]),
        SymMat::from_rows(&[[lambdas[1], a1, 0.0], [a1, beta[0], 0.0], [0.0, 0.0, 0.0]]),
        SymMat::from_rows(&[[lambdas[2], 0.0, a2], [0.0, 0.0, 0.0], [a2, 0.0, beta[1]]]),
        {
            let mut m = build_m(z, beta);
            m.set(0, 0, lambdas[3]);
            m
        },
    ];
    let blocks = [0, 1, 2, 3].map(|k| {
        let l = lambdas[k];
        if l.abs() <= tol.eq_tol && numerators[k].max_abs() <= tol.eq_tol {
            SymMat::zeros(3)
        } else {
            numerators[k].scale(1.0 / l)
        }
    });

    let mut recon = SymMat::zeros(3);
    for k in 0..4 {
        recon = recon.add(&blocks[k].scale(lambdas[k]));
    }
    let mut residual = recon.sub(&b.moment_matrix()).max_abs();
    let yrec = [lambdas[1] + lambdas[3], lambdas[2] + lambdas[3], lambdas[3]];
    residual = residual.max((yrec[0] - b.y[0]).abs()).max((yrec[1] - b.y[1]).abs()).max((yrec[2] - b.y12).abs());

    let mut report = Report::new();
    for (k, l) in lambdas.iter().enumerate() {
        report.push(format!("lambda[{k}] >= 0"), *l, tol.eq_tol);
    }
    let sum: f64 = lambdas.iter().sum();
    report.push("sum lambda = 1", -(sum - 1.0).abs(), 1e-10);
    report.push("reconstruction identity", -residual, 1e-10);

    // y = 0: the block is the atom (1, 0; 0, 0) or vanishes
    let z0 = &blocks[0];
    let z0_dev = z0.sub(&SymMat::diag(&[z0.get(0, 0), 0.0, 0.0])).max_abs().max((z0.get(0, 0) * (1.0 - z0.get(0, 0))).abs());
    report.push("Z_0 trivial", -z0_dev, tol.eq_tol);

    // y = e_j: Z lies in the n = 1 hull embedded in coordinate j
    for (k, j) in [(1usize, 0usize), (2, 1)] {
        let (l, alpha_j, beta_j) = (lambdas[k], z.alpha[j], beta[j]);
        let label = format!("Z_e{} ", j + 1);
        let h1 = if l > NORMALIZE_MIN_WEIGHT {
            h1_contains(&H1Point::new(alpha_j / l, beta_j / l, 1.0), tol)
        } else {
            per_contains(&PerPoint::new(alpha_j, beta_j, l), tol)
        };
        report.extend(h1.prefixed(&label));
        let other = 1 - j;
        let blk = &numerators[k];
        let off = blk.get(0, other + 1).abs().max(blk.get(other + 1, other + 1).abs()).max(blk.get(1, 2).abs());
        report.push(format!("{label}zero off-support"), -off, tol.eq_tol);
    }

    // y = e: PSD ∩ RLT_x
    let ze = if lambdas[3] > NORMALIZE_MIN_WEIGHT { blocks[3] } else { numerators[3] };
    report.extend(psd_report("Z_e PSD", &ze, tol));
    report.extend(rltx_contains(&RltxMat::from_bordered(&ze), tol).prefixed("Z_e "));

    let d = Decomposition { lambdas, blocks, residual, report };
    if !d.report.passed() {
        return Err(Error::NotMember(d.report));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn lift(ybits: YBits, x: [f64; 2]) -> LiftedPoint {
        atom_lift(&Atom::new(ybits, x).unwrap())
    }

    pub(crate) fn random_atom(rng: &mut impl Rng) -> Atom {
        let ybits = YBits::ALL[rng.gen_range(0..4)];
        let y = ybits.y();
        Atom::new(ybits, [rng.gen::<f64>() * y[0], rng.gen::<f64>() * y[1]]).unwrap()
    }

    fn random_mix(rng: &mut impl Rng) -> LiftedPoint {
        let k = rng.gen_range(1..=6);
        let w: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        let parts: Vec<_> = w.iter().map(|wi| (wi / s, atom_lift(&random_atom(rng)))).collect();
        LiftedPoint::combine(&parts)
    }

    #[test]
    fn atom_lift_examples() {
        let z = lift(YBits::E1, [0.7, 0.0]);
        assert_eq!(z.alpha, [0.7, 0.0]);
        assert!((z.beta.unwrap()[0] - 0.49).abs() < 1e-15 && z.beta.unwrap()[1] == 0.0);
        let z = lift(YBits::E, [0.3, 0.9]);
        assert_eq!((z.alpha, z.beta), ([0.0; 2], Some([0.0; 2])));
        assert_eq!(lift(YBits::Zero, [0.0, 0.0]), LiftedPoint::default().with_beta([0.0; 2]));
        assert!(Atom::new(YBits::E1, [0.5, 0.1]).is_err());
        assert!(Atom::new(YBits::E, [1.1, 0.1]).is_err());
    }

    #[test]
    fn build_m_examples() {
        let m = build_m(&lift(YBits::E, [0.5, 0.5]), [0.0, 0.0]);
        let expected = SymMat::from_rows(&[[1.0, 0.5, 0.5], [0.5, 0.25, 0.25], [0.5, 0.25, 0.25]]);
        assert_eq!(m, expected);
        assert!(m.is_psd(&tol()));
        let z = lift(YBits::E1, [0.7, 0.0]);
        assert!(build_m(&z, z.beta.unwrap()).max_abs() < 1e-15);
        assert_eq!(build_m(&LiftedPoint::default(), [0.0; 2]), SymMat::zeros(3));
    }

    #[test]
    fn beta_pq_examples() {
        let mut z = LiftedPoint::default();
        z.base.y = [1.0, 1.0];
        z.base.y12 = 1.0;
        assert_eq!(beta_pq(&z, 2, 2, &tol()).unwrap(), [0.0, 0.0]);

        let mut z = LiftedPoint::default();
        z.base.y = [1.0, 0.5];
        z.base.y12 = 0.5;
        z.alpha = [0.25, 0.0];
        assert_eq!(beta_pq(&z, 2, 2, &tol()).unwrap(), [0.125, 0.0]);

        let mut z = LiftedPoint::default();
        z.base.x = [0.5, 0.5];
        z.base.x11 = 0.4;
        z.base.x22 = 0.4;
        z.alpha = [0.1, 0.1];
        let b = beta_pq(&z, 1, 1, &tol()).unwrap();
        assert!(b[0].abs() < 1e-15 && b[1].abs() < 1e-15);
    }

    #[test]
    fn beta_pq_degenerate_lift() {
        let mut z = LiftedPoint::default();
        z.base.y = [1.0, 1.0];
        z.base.y12 = 1.0;
        z.alpha = [0.2, 0.0];
        assert!(matches!(beta_pq(&z, 2, 1, &tol()), Err(Error::DegenerateLift { j: 1, .. })));
        assert!(beta_pq(&z, 1, 2, &tol()).is_ok());
        assert!(matches!(check(&z, System::NoBeta, &tol()), Err(Error::DegenerateLift { .. })));
    }

    #[test]
    fn atoms_pass_every_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let z = atom_lift(&random_atom(&mut rng));
            for s in System::ALL {
                let c = check(&z, s, &tol()).unwrap();
                assert!(c.passed(), "{s}: {}", c.report);
                assert!(c.schur_mismatches.is_empty());
            }
        }
    }

    #[test]
    fn half_mix_of_e_and_zero_passes() {
        let z = LiftedPoint::combine(&[(0.5, lift(YBits::E, [1.0, 1.0])), (0.5, lift(YBits::Zero, [0.0, 0.0]))]);
        for s in System::ALL {
            assert!(check(&z, s, &tol()).unwrap().passed(), "{s}");
        }
    }

    #[test]
    fn minimal_rejects_overlifted_point() {
        let z = LiftedPoint::new(HullPoint { x: [1.0, 0.0], x11: 1.0, y: [1.0, 0.0], ..Default::default() }, [0.5, 0.0]);
        let c = check(&z, System::Minimal, &tol()).unwrap();
        assert!(!c.passed());
        assert!(!c.report.get("(5x5') PSD").unwrap().holds());
        // eig_min computed independently on the assembled matrix
        let m = primed(&z, PsdCondition::FiveByFive);
        assert!(m.eig_min().0 < -0.01);
        // X11 - a1^2/(y1 - Y12) = 0.75 exceeds x1 - a1 = 0.5 yet the 5x5 still fails
        assert!(z.base.x11 - 0.25 > z.base.x[0] - 0.5);
    }

    #[test]
    fn disjunctive_requires_beta() {
        let z = LiftedPoint::default();
        assert!(matches!(check(&z, System::Disjunctive, &tol()), Err(Error::Precondition(_))));
    }

    #[test]
    fn swap_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let z = random_mix(&mut rng);
            assert_eq!(z.swapped().swapped(), z);
            let s = z.swapped();
            assert_eq!((s.base.x12, s.base.y12), (z.base.x12, z.base.y12));
            let (a, b) = (primed(&s, PsdCondition::FourFirst).eig_min().0, primed(&z, PsdCondition::FourSecond).eig_min().0);
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&lift(YBits::E1, [0.7, 0.0]), &tol()).unwrap();
        assert_eq!(d.lambdas, [0.0, 1.0, 0.0, 0.0]);
        let expected = SymMat::from_rows(&[[1.0, 0.7, 0.0], [0.7, 0.49, 0.0], [0.0, 0.0, 0.0]]);
        assert!(d.blocks[1].sub(&expected).max_abs() < 1e-15);

        let d = decompose(&lift(YBits::E, [1.0, 1.0]), &tol()).unwrap();
        assert_eq!(d.lambdas, [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(d.blocks[3], SymMat::from_fn(3, |_, _| 1.0));

        let parts: Vec<_> = YBits::ALL.iter().map(|&yb| (0.25, lift(yb, yb.y()))).collect();
        let d = decompose(&LiftedPoint::combine(&parts), &tol()).unwrap();
        assert_eq!(d.lambdas, [0.25; 4]);
        assert!(d.residual <= 1e-12);
    }

    #[test]
    fn literal_lambda_rule_fails() {
        let parts = [(0.5, lift(YBits::E1, [0.3, 0.0])), (0.5, lift(YBits::Zero, [0.0, 0.0]))];
        let z = LiftedPoint::combine(&parts);
        assert!(decompose(&z, &tol()).is_ok());
        assert!(matches!(decompose_with(&z, LambdaRule::Literal, &tol()), Err(Error::NotMember(_))));
    }

    #[test]
    fn t_matrix_examples() {
        let mut z = LiftedPoint::default();
        z.base.y = [1.0, 1.0];
        z.base.y12 = 1.0;
        let t = t_matrices(&z);
        assert_eq!((t.t, t.t12), ([0.0, 0.0], 0.0));
        assert_eq!(t.strengthened, t.original);

        let t = t_matrices(&LiftedPoint::default());
        assert_eq!(t.t12, 1.0);
        assert_eq!((0..5).map(|i| t.original.get(i, i)).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(t.strengthened, SymMat::zeros(5));

        let t = t_matrices(&lift(YBits::E1, [0.7, 0.0]));
        assert!(t.strengthened.eig_min().0 >= -1e-10);
        assert!(t.original.eig_min().0 >= -1e-10);
    }

    #[test]
    fn mixtures_pass_every_system_and_decompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2_000 {
            let z = random_mix(&mut rng);
            for s in System::ALL {
                let c = check(&z, s, &tol()).unwrap();
                assert!(c.passed(), "{s}: {} at {z:?}", c.report);
                assert!(c.schur_mismatches.is_empty());
            }
            let d = decompose(&z, &tol()).unwrap();
            assert!(d.residual <= 1e-10);
            assert!((d.lambdas.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn decreasing_beta_preserves_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..2_000 {
            let z = random_mix(&mut rng);
            let beta = z.beta.unwrap();
            let m = build_m(&z, beta);
            assert!(m.is_psd(&tol()));
            let d = [rng.gen::<f64>(), rng.gen::<f64>()];
            assert!(build_m(&z, [beta[0] - d[0], beta[1] - d[1]]).is_psd(&tol()));
        }
    }
}
