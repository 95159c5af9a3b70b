//! Support function of each representation set, computed by a deep-cut
//! ellipsoid method over the lifted variables
//! `v = (x1, x2, X11, X12, X22, y1, y2, Y12, α1, α2) ∈ [0,1]¹⁰`.
//!
//! Every system is a list of affine slacks `aᵀv + b ≥ 0` and affine matrices
//! `M(v) ⪰ 0`. Both are recovered from the membership code in
//! [`crate::hull2`] by probing at the origin and the unit vectors, so the
//! solver and the checkers share one definition of each constraint.
//!
//! For the disjunctive system, `β` is fixed pointwise to its smallest
//! admissible value `β_j = max{α_j² / (y_j - Y12), X_jj - x_j + α_j}`. With
//! that choice `M(β) ⪰ 0` holds iff all four `M(β_pq) ⪰ 0` do, `X_jj ≥ β_j`
//! becomes `α_j ≤ x_j` plus `(y_j - Y12, α_j; α_j, X_jj) ⪰ 0`, and the
//! perspective conditions reduce to linear bounds.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hull2::{linear_conditions, minimal_beta, primed, t_matrices, HullPoint, LiftedPoint, PsdCondition, System};
use crate::oracle::Objective;
use crate::report::Report;
use crate::smat::{SymMat, TolerancePolicy};

pub const NVARS: usize = 10;
pub type Vars = [f64; NVARS];

pub const VAR_NAMES: [&str; NVARS] = ["x1", "x2", "X11", "X12", "X22", "y1", "y2", "Y12", "a1", "a2"];

pub fn to_lifted(v: &Vars) -> LiftedPoint {
    let mut base = [0.0; 8];
    base.copy_from_slice(&v[..8]);
    LiftedPoint::new(HullPoint::from_array(&base), [v[8], v[9]])
}

pub fn to_vars(z: &LiftedPoint) -> Vars {
    let b = z.base.to_array();
    std::array::from_fn(|k| if k < 8 { b[k] } else { z.alpha[k - 8] })
}

/// A valid inequality `normalᵀv ≥ offset` with unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub name: String,
    pub normal: Vars,
    pub offset: f64,
}

impl Cut {
    fn new(name: &str, a: Vars, b: f64) -> Self {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self { name: name.to_string(), normal: a.map(|x| x / norm), offset: b / norm }
    }

    /// `normalᵀv - offset`; negative where the cut is violated.
    pub fn slack(&self, v: &Vars) -> f64 {
        dot(&self.normal, v) - self.offset
    }
}

fn dot(a: &Vars, b: &Vars) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Row {
    name: String,
    a: Vars,
    b: f64,
}

struct Lmi {
    name: &'static str,
    m0: SymMat,
    mk: [SymMat; NVARS],
}

impl Lmi {
    fn probe(name: &'static str, f: impl Fn(&LiftedPoint) -> SymMat) -> Self {
        let m0 = f(&to_lifted(&[0.0; NVARS]));
        let mk = std::array::from_fn(|k| {
            let mut e = [0.0; NVARS];
            e[k] = 1.0;
            f(&to_lifted(&e)).sub(&m0)
        });
        Self { name, m0, mk }
    }

    fn eval(&self, v: &Vars) -> SymMat {
        let mut m = self.m0;
        for (k, mk) in self.mk.iter().enumerate() {
            if v[k] != 0.0 {
                m = m.add(&mk.scale(v[k]));
            }
        }
        m
    }
}

struct Model {
    rows: Vec<Row>,
    lmis: Vec<Lmi>,
}

fn probe_rows(f: impl Fn(&LiftedPoint) -> Report) -> Vec<Row> {
    let zero = f(&to_lifted(&[0.0; NVARS]));
    let unit: Vec<Report> = (0..NVARS)
        .map(|k| {
            let mut e = [0.0; NVARS];
            e[k] = 1.0;
            f(&to_lifted(&e))
        })
        .collect();
    zero.slacks
        .iter()
        .enumerate()
        .map(|(i, s)| Row {
            name: s.name.clone(),
            a: std::array::from_fn(|k| unit[k].slacks[i].value - s.value),
            b: s.value,
        })
        .collect()
}

fn box_rows() -> Vec<Row> {
    let mut rows = Vec::new();
    for (k, name) in VAR_NAMES.iter().enumerate() {
        let mut a = [0.0; NVARS];
        a[k] = 1.0;
        rows.push(Row { name: format!("{name} >= 0"), a, b: 0.0 });
        rows.push(Row { name: format!("{name} <= 1"), a: a.map(|x| -x), b: 1.0 });
    }
    rows
}

/// Linear consequences of the disjunctive system once `β` is minimal.
fn disjunctive_extra(z: &LiftedPoint) -> Report {
    let mut r = Report::new();
    for j in 0..2 {
        r.push(format!("a{} <= x{}", j + 1, j + 1), z.base.x[j] - z.alpha[j], 0.0);
        r.push(format!("X{0}{0} >= 0", j + 1), z.base.xjj(j), 0.0);
    }
    r
}

fn perspective_block(z: &LiftedPoint, j: usize) -> SymMat {
    SymMat::from_rows(&[[z.base.gamma(j), z.alpha[j]], [z.alpha[j], z.base.xjj(j)]])
}

fn build_model(system: System) -> Model {
    let tol = TolerancePolicy::default();
    let mut rows = box_rows();
    rows.extend(probe_rows(|z| linear_conditions(z, &tol)));
    let mut lmis = Vec::new();
    match system {
        System::Minimal => lmis.push(Lmi::probe("5x5", |z| primed(z, PsdCondition::FiveByFive))),
        System::Conjecture => lmis.push(Lmi::probe("t-space 5x5", |z| t_matrices(z).original)),
        System::NoBeta | System::Disjunctive => {
            for cond in PsdCondition::ALL {
                lmis.push(Lmi::probe(cond.name(), move |z| primed(z, cond)));
            }
            if system == System::Disjunctive {
                rows.extend(probe_rows(disjunctive_extra));
                lmis.push(Lmi::probe("perspective j=1", |z| perspective_block(z, 0)));
                lmis.push(Lmi::probe("perspective j=2", |z| perspective_block(z, 1)));
            }
        }
    }
    Model { rows, lmis }
}

fn model(system: System) -> &'static Model {
    static MODELS: [OnceLock<Model>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let k = System::ALL.iter().position(|&s| s == system).expect("listed");
    MODELS[k].get_or_init(|| build_model(system))
}

/// Slack below which a linear constraint counts as violated.
const FEAS_TOL: f64 = 1e-11;

/// A violated inequality at `v`, or `None` if `v` satisfies the system to
/// within a small tolerance. Linear constraints are checked first and the
/// most violated one is returned; semidefinite violations give the cut
/// `wᵀM(v′)w ≥ 0` with `w` the eigenvector of the smallest eigenvalue.
pub fn separate(v: &Vars, system: System) -> Option<Cut> {
    let m = model(system);
    let mut worst: Option<(f64, &Row)> = None;
    for row in &m.rows {
        let s = dot(&row.a, v) + row.b;
        let norm = row.a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let rel = s / norm;
        if rel < -FEAS_TOL && worst.is_none_or(|(w, _)| rel < w) {
            worst = Some((rel, row));
        }
    }
    if let Some((_, row)) = worst {
        return Some(Cut::new(&row.name, row.a, -row.b));
    }
    for lmi in &m.lmis {
        let mv = lmi.eval(v);
        if mv.shift(FEAS_TOL * (1.0 + mv.max_abs())).cholesky_succeeds() {
            continue;
        }
        let (e, w) = mv.eig_min();
        if e >= -FEAS_TOL * (1.0 + mv.max_abs()) {
            continue;
        }
        let a: Vars = std::array::from_fn(|k| lmi.mk[k].quad_form(&w));
        return Some(Cut::new(lmi.name, a, -lmi.m0.quad_form(&w)));
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub accuracy: f64,
    /// Defaults to `4 n² ln(R / accuracy)` plus a margin.
    pub max_iterations: Option<usize>,
}

impl SolveOptions {
    pub fn new(accuracy: f64) -> Self {
        Self { accuracy, max_iterations: None }
    }

    pub fn iteration_cap(&self) -> usize {
        self.max_iterations.unwrap_or_else(|| {
            let n = NVARS as f64;
            (4.0 * n * n * (initial_radius() / self.accuracy).ln()).ceil() as usize + 2_000
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub value: f64,
    pub argmax: LiftedPoint,
    pub iterations: usize,
    /// Upper bound minus `value`.
    pub certified_gap: f64,
}

fn initial_radius() -> f64 {
    (NVARS as f64).sqrt() / 2.0
}

fn objective_vars(obj: &Objective) -> Vars {
    let g = obj.gradient();
    std::array::from_fn(|k| if k < 8 { g[k] } else { 0.0 })
}

/// `{centre + B u : ‖u‖ ≤ 1}`. Keeping the factor `B` instead of `P = BBᵀ`
/// keeps the shape matrix positive semidefinite after thousands of cuts.
struct Ellipsoid {
    centre: Vars,
    b: [[f64; NVARS]; NVARS],
}

impl Ellipsoid {
    fn ball(centre: Vars, radius: f64) -> Self {
        let mut b = [[0.0; NVARS]; NVARS];
        for (i, row) in b.iter_mut().enumerate() {
            row[i] = radius;
        }
        Self { centre, b }
    }

    /// `Bᵀg`.
    fn btg(&self, g: &Vars) -> Vars {
        std::array::from_fn(|j| (0..NVARS).map(|i| self.b[i][j] * g[i]).sum())
    }

    /// `max_{v ∈ E} gᵀv`.
    fn support(&self, g: &Vars) -> f64 {
        let w = self.btg(g);
        dot(g, &self.centre) + dot(&w, &w).sqrt()
    }

    /// Keeps `{v ∈ E : gᵀv ≤ h}`. Returns `false` if the ellipsoid degenerates.
    fn cut(&mut self, g: &Vars, h: f64) -> bool {
        let n = NVARS as f64;
        let w = self.btg(g);
        let root = dot(&w, &w).sqrt();
        if !(root > 0.0) || !root.is_finite() {
            return false;
        }
        let alpha = ((dot(g, &self.centre) - h) / root).clamp(0.0, 0.9);
        let p = w.map(|x| x / root);
        let bp: Vars = std::array::from_fn(|i| dot(&self.b[i], &p));
        let step = (1.0 + n * alpha) / (n + 1.0);
        for i in 0..NVARS {
            self.centre[i] -= step * bp[i];
        }
        let sigma = 2.0 * (1.0 + n * alpha) / ((n + 1.0) * (1.0 + alpha));
        let delta = n * n * (1.0 - alpha * alpha) / (n * n - 1.0);
        let kappa = 1.0 - (1.0 - sigma).sqrt();
        let scale = delta.sqrt();
        for i in 0..NVARS {
            for j in 0..NVARS {
                self.b[i][j] = scale * (self.b[i][j] - kappa * bp[i] * p[j]);
            }
        }
        true
    }
}

/// Maximum of `obj` over the representation of `system`, to within
/// `accuracy`. Deterministic.
pub fn support(system: System, obj: &Objective, accuracy: f64) -> Result<SolveResult> {
    support_with(system, obj, &SolveOptions::new(accuracy))
}

pub fn support_with(system: System, obj: &Objective, opts: &SolveOptions) -> Result<SolveResult> {
    if !obj.is_finite() {
        return Err(Error::Invalid("objective has non-finite coefficients".into()));
    }
    maximize_linear(system, &objective_vars(obj), opts)
}

/// Maximum of `cᵀv` over the lifted set itself, including the `α`
/// coordinates. [`support_with`] is the special case with zero cost on `α`.
pub fn maximize_linear(system: System, c: &Vars, opts: &SolveOptions) -> Result<SolveResult> {
    if !(opts.accuracy >= 1e-8) {
        return Err(Error::Invalid(format!("accuracy {} below 1e-8", opts.accuracy)));
    }
    if !c.iter().all(|x| x.is_finite()) {
        return Err(Error::Invalid("cost vector has non-finite entries".into()));
    }
    let c = *c;
    let cap = opts.iteration_cap();
    let mut e = Ellipsoid::ball([0.5; NVARS], initial_radius());
    // the origin (the y = 0 atom) lies in every representation
    let origin = [0.0; NVARS];
    debug_assert!(separate(&origin, system).is_none());
    let mut best: Option<(f64, Vars)> = Some((0.0, origin));
    let mut upper = f64::INFINITY;
    let neg_c = c.map(|x| -x);
    for it in 1..=cap {
        match separate(&e.centre, system) {
            Some(cut) => {
                if let Some((b, v)) = best {
                    if dot(&c, &e.centre) > b {
                        best = Some(push_toward(system, &c, v, &e.centre));
                    }
                }
                let g = cut.normal.map(|x| -x);
                if !e.cut(&g, -cut.offset) {
                    break;
                }
            }
            None => {
                let f = dot(&c, &e.centre);
                if best.is_none_or(|(b, _)| f > b) {
                    best = Some((f, e.centre));
                }
                let b = best.unwrap().0;
                if !e.cut(&neg_c, -b) {
                    break;
                }
            }
        }
        if let Some((b, _)) = best {
            upper = upper.min(e.support(&c));
            if upper - b <= opts.accuracy {
                return Ok(finish(system, best.unwrap(), it, (upper - b).max(0.0)));
            }
        }
    }
    let gap = best.map_or(f64::INFINITY, |(b, _)| upper - b);
    Err(Error::NonConvergence { iterations: cap, gap, best: best.map_or(f64::NAN, |b| b.0) })
}

/// Moves from the feasible point `from` toward `to` as far as feasibility
/// allows, by bisection on the segment.
fn push_toward(system: System, c: &Vars, from: Vars, to: &Vars) -> (f64, Vars) {
    let at = |s: f64| -> Vars { std::array::from_fn(|k| from[k] + s * (to[k] - from[k])) };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if separate(&at(mid), system).is_none() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = at(lo);
    (dot(c, &v), v)
}

const BISECTION_STEPS: usize = 30;

fn finish(system: System, best: (f64, Vars), iterations: usize, gap: f64) -> SolveResult {
    let mut argmax = to_lifted(&best.1);
    if system == System::Disjunctive {
        let loose = TolerancePolicy::default().loosened(10.0);
        argmax.beta = minimal_beta(&argmax, &loose).ok();
    }
    SolveResult { value: best.0, argmax, iterations, certified_gap: gap }
}
