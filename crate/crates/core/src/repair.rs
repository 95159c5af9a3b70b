//! Completing a certificate for the single-PSD system.
//!
//! A point that satisfies the linear conditions and the 5×5 condition can
//! still violate one of the two 4×4 conditions of the four-PSD system. The
//! routines here find a new `α` that makes every condition hold, which shows
//! the 5×5 condition alone already describes the hull.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hull2::{atom_lift, check, linear_conditions, primed, Atom, LiftedPoint, PsdCondition, System, YBits};
use crate::report::Report;
use crate::smat::{SymMat, TolerancePolicy};

/// Which Schur-form conditions fail at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureProfile {
    pub fails_3x3: bool,
    pub fails_4x4first: bool,
    pub fails_4x4second: bool,
    pub fails_5x5: bool,
    /// Smallest eigenvalue and its floor for each condition, in
    /// [`PsdCondition::ALL`] order.
    pub slacks: Report,
}

impl FailureProfile {
    pub fn lacks_only_first(&self) -> bool {
        self.fails_4x4first && !self.fails_4x4second && !self.fails_3x3 && !self.fails_5x5
    }

    pub fn none_fail(&self) -> bool {
        !(self.fails_3x3 || self.fails_4x4first || self.fails_4x4second || self.fails_5x5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha2Interval {
    pub theta: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaInterval {
    pub rho: f64,
    pub lo: f64,
    pub hi: f64,
}

fn schur_profile(z: &LiftedPoint, tol: &TolerancePolicy) -> FailureProfile {
    let mut slacks = Report::new();
    for cond in PsdCondition::ALL {
        let m = primed(z, cond);
        slacks.push(cond.name(), m.eig_min().0, m.psd_floor(tol));
    }
    let fails = |c: PsdCondition| !slacks.get(c.name()).unwrap().holds();
    FailureProfile {
        fails_3x3: fails(PsdCondition::ThreeByThree),
        fails_4x4first: fails(PsdCondition::FourFirst),
        fails_4x4second: fails(PsdCondition::FourSecond),
        fails_5x5: fails(PsdCondition::FiveByFive),
        slacks,
    }
}

/// Classifies a point that satisfies the single-PSD system. The 3×3 condition
/// never fails and at most one 4×4 condition fails; seeing otherwise is a
/// structural error.
pub fn classify(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<FailureProfile> {
    let pre = check(z, System::Minimal, tol)?;
    if !pre.passed() {
        return Err(Error::Precondition(format!("point fails the 5x5 system: {}", pre.report)));
    }
    let p = schur_profile(z, tol);
    if p.fails_3x3 {
        return Err(Error::Structural(format!("3x3 condition fails under the linear conditions: {}", p.slacks)));
    }
    if p.fails_4x4first && p.fails_4x4second {
        return Err(Error::Structural(format!("both 4x4 conditions fail: {}", p.slacks)));
    }
    Ok(p)
}

/// Moves `α1` into `x1` and `X11`, leaving a point with `α1 = 0` that lacks
/// the same condition.
pub fn reduce_alpha1(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<LiftedPoint> {
    let a1 = z.alpha[0];
    let g1 = z.base.gamma(0);
    if a1 <= tol.eq_tol {
        return Err(Error::Precondition(format!("alpha1 = {a1:e} is not positive")));
    }
    if g1 <= tol.eq_tol {
        return Err(Error::DegenerateLift { j: 1, gap: g1, alpha: a1 });
    }
    let mut out = *z;
    out.base.x[0] -= a1;
    out.base.x11 -= a1 * a1 / g1;
    out.alpha[0] = 0.0;
    Ok(out)
}

/// `θ = Y12 X11 - x1²` and the roots `α2∓` of `det(V) = 0` for a point with
/// `α1 = 0`.
pub fn alpha2_interval(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<Alpha2Interval> {
    let b = &z.base;
    let (x1, x2, x11, x12) = (b.x[0], b.x[1], b.x11, b.x12);
    if x11 <= tol.eq_tol {
        return Err(Error::Precondition(format!("X11 = {x11:e} is not positive")));
    }
    let theta = b.y12 * x11 - x1 * x1;
    if theta < -tol.eq_tol {
        return Err(Error::Precondition(format!("theta = {theta:e} is negative")));
    }
    let theta = theta.max(0.0);
    let disc = (theta * (theta + 4.0 * x12 * (x1 - x12))).max(0.0);
    let centre = x2 - x12 * x1 / x11;
    let root = disc.sqrt();
    Ok(Alpha2Interval { theta, lo: centre - (theta + root) / (2.0 * x11), hi: centre - (theta - root) / (2.0 * x11) })
}

/// The 3×3 matrix `V` whose PSD-ness is the first 4×4 condition when `α1 = 0`.
pub fn v_matrix(z: &LiftedPoint, alpha2: f64) -> SymMat {
    let b = &z.base;
    let u2 = b.x[1] - alpha2;
    SymMat::from_rows(&[[b.y12, b.x[0], u2], [b.x[0], b.x11, b.x12], [u2, b.x12, u2]])
}

/// The roots `λ∓` of `x2 - α2 = X22 - α2² / (y2 - Y12)`.
pub fn lambda_interval(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<LambdaInterval> {
    let b = &z.base;
    let g2 = b.gamma(1);
    if g2 <= tol.eq_tol {
        return Err(Error::Precondition(format!("y2 - Y12 = {g2:e} is not positive")));
    }
    let d = b.x[1] - b.x22;
    if d < -tol.eq_tol || d > 0.25 * g2 + tol.eq_tol {
        return Err(Error::Precondition(format!("x2 - X22 = {d:e} outside [0, (y2 - Y12)/4]")));
    }
    let rho = (1.0 - 4.0 * d.max(0.0) / g2).max(0.0).sqrt();
    Ok(LambdaInterval { rho, lo: 0.5 * (1.0 - rho) * g2, hi: 0.5 * (1.0 + rho) * g2 })
}

/// Maximizer over `α2` of the determinant of the 4×4 matrix left from the 5×5
/// condition once `α1 = 0`.
pub fn alpha2_star(z: &LiftedPoint) -> f64 {
    let b = &z.base;
    b.gamma(1) * (b.x[1] * b.x11 - b.x[0] * b.x12) / (b.y[1] * b.x11 - b.x[0] * b.x[0])
}

/// The 5×5 condition with the `y1 - Y12` row removed, as a function of `α2`.
pub fn reduced_five(z: &LiftedPoint, alpha2: f64) -> SymMat {
    primed(&z.with_alpha([0.0, alpha2]), PsdCondition::FiveByFive).principal(&[1, 2, 3, 4])
}

/// Returns `α′` such that the point satisfies every condition of the
/// four-PSD system. Points that already do are returned unchanged.
pub fn repair(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<LiftedPoint> {
    let profile = classify(z, tol)?;
    if !profile.fails_4x4first && !profile.fails_4x4second {
        return Ok(*z);
    }
    let out = if profile.fails_4x4second {
        repair_first(&z.swapped(), tol)?.swapped()
    } else {
        repair_first(z, tol)?
    };
    let post = check(&out, System::NoBeta, tol)?;
    if !post.passed() {
        return Err(Error::RepairFailed(post.report));
    }
    Ok(out)
}

fn repair_first(z: &LiftedPoint, tol: &TolerancePolicy) -> Result<LiftedPoint> {
    let work = if z.alpha[0] > tol.eq_tol { reduce_alpha1(z, tol)? } else { z.with_alpha([0.0, z.alpha[1]]) };
    let iv = alpha2_interval(&work, tol)?;
    let a2 = work.alpha[1];
    let hat = if a2 < iv.lo {
        iv.lo
    } else if a2 > iv.hi {
        iv.hi
    } else if check(&z.with_alpha([z.alpha[0], a2]), System::NoBeta, &tol.loosened(10.0))?.passed() {
        a2
    } else if a2 - iv.lo <= iv.hi - a2 {
        iv.lo
    } else {
        iv.hi
    };
    Ok(z.with_alpha([z.alpha[0], hat]))
}

fn sample_mixture(rng: &mut impl Rng) -> LiftedPoint {
    let k = rng.gen_range(2..=4);
    let mut parts = Vec::with_capacity(k);
    for _ in 0..k {
        let ybits = match rng.gen_range(0..10) {
            0..=3 => YBits::E2,
            4..=5 => YBits::E1,
            6..=7 => YBits::E,
            _ => YBits::Zero,
        };
        let y = ybits.y();
        let mut coord = |yj: f64| {
            let t: f64 = match rng.gen_range(0..3) {
                0 => rng.gen::<f64>() * 0.1,
                1 => 1.0 - rng.gen::<f64>() * 0.1,
                _ => rng.gen(),
            };
            t * yj
        };
        let x = [coord(y[0]), coord(y[1])];
        parts.push((rng.gen::<f64>() + 0.05, atom_lift(&Atom::new(ybits, x).expect("x within y"))));
    }
    let total: f64 = parts.iter().map(|p| p.0).sum();
    for p in &mut parts {
        p.0 /= total;
    }
    let mut z = LiftedPoint::combine(&parts);
    z.beta = None;
    z
}

/// Draws `α2` from the part of `[λ-, λ+]` outside `[α2-, α2+]`, where the
/// first 4×4 condition fails while the 5×5 condition may still hold.
fn lacking_alpha2(z: &LiftedPoint, tol: &TolerancePolicy, rng: &mut impl Rng) -> Option<f64> {
    let work = if z.alpha[0] > 0.0 { reduce_alpha1(z, tol).ok()? } else { *z };
    let lam = lambda_interval(&work, tol).ok()?;
    let iv = alpha2_interval(&work, tol).ok()?;
    let top = lam.hi.min(work.base.gamma(1));
    let left = (lam.lo, iv.lo.min(top));
    let right = (iv.hi.max(lam.lo), top);
    let len = |p: (f64, f64)| (p.1 - p.0).max(0.0);
    let total = len(left) + len(right);
    if total <= 1e-9 {
        return None;
    }
    let u = rng.gen::<f64>() * total;
    Some(if u < len(left) { left.0 + u } else { right.0 + (u - len(left)) })
}

/// Deterministic rejection sampler for points that satisfy the 5×5 system
/// but lack the first 4×4 condition. About half the returned points have
/// `α1 = 0`. May return fewer than `budget` points.
pub fn sample_lacking(seed: u64, budget: usize) -> Vec<LiftedPoint> {
    let tol = TolerancePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(budget);
    let max_draws = 2_000 * budget.max(1);
    for _ in 0..max_draws {
        if out.len() >= budget {
            break;
        }
        let base = sample_mixture(&mut rng);
        let g = [base.base.gamma(0), base.base.gamma(1)];
        let a1 = if rng.gen_bool(0.5) { 0.0 } else { rng.gen::<f64>() * base.alpha[0].max(g[0] * rng.gen::<f64>()) };
        let Some(a2) = lacking_alpha2(&base.with_alpha([a1, 0.0]), &tol, &mut rng) else {
            continue;
        };
        let z = base.with_alpha([a1, a2]);
        if !linear_conditions(&z, &tol).passed() {
            continue;
        }
        let p = schur_profile(&z, &tol);
        let margin = p.slacks.get(PsdCondition::FourFirst.name()).unwrap();
        if p.lacks_only_first() && margin.value < -1e3 * margin.floor {
            out.push(z);
        }
    }
    out
}
