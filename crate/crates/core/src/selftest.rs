//! Property suites run by `swhull selftest`.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::experiments::{run_trials, Status, TrialConfig, GAP_THRESHOLD};
use crate::hull1::{h1_contains, witness_is_dnn, H1Point};
use crate::hull2::{check, decompose_with, primed, LambdaRule, PsdCondition, System};
use crate::oracle::support_atoms;
use crate::pointfile::PointFile;
use crate::repair::{repair, sample_lacking};
use crate::sample::{disjunctive_mixture, linear_feasible, random_atom, random_objective, trial_rng};
use crate::smat::{SymMat, TolerancePolicy};
use crate::solver::support;

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Weight rule used by the decomposition suite.
    pub lambda_rule: LambdaRule,
}

impl SelftestOptions {
    pub fn new(seed: u64) -> Self {
        Self { seed, lambda_rule: LambdaRule::Corrected }
    }
}

type Suite = fn(&SelftestOptions) -> Result<String, String>;

const SUITES: [(&str, Suite); 9] = [
    ("eigen", eigen),
    ("hull1", hull1),
    ("atoms", atoms),
    ("decomposition", decomposition),
    ("redundant 3x3", redundant_3x3),
    ("repair", repair_suite),
    ("solver", solver),
    ("conjecture", conjecture),
    ("pointfile", pointfile),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

/// Runs every suite in order; `on_done` sees each outcome as it finishes.
pub fn run(opts: &SelftestOptions, mut on_done: impl FnMut(&SuiteOutcome)) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .enumerate()
        .map(|(k, (name, f))| {
            let start = Instant::now();
            let sub = SelftestOptions { seed: opts.seed.wrapping_add(k as u64), ..*opts };
            let r = f(&sub);
            let out = SuiteOutcome {
                name,
                passed: r.is_ok(),
                detail: r.unwrap_or_else(|e| e),
                elapsed: start.elapsed(),
            };
            on_done(&out);
            out
        })
        .collect()
}

fn eigen(o: &SelftestOptions) -> Result<String, String> {
    let mut rng = trial_rng(o.seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..2_000 {
        let n = rng.gen_range(1..=6);
        let s = SymMat::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
        let (vals, vecs) = s.eigen();
        let r = SymMat::from_fn(n, |i, j| (0..n).map(|k| vals[k] * vecs[k][i] * vecs[k][j]).sum());
        worst = worst.max(r.sub(&s).max_abs());
    }
    if worst <= 1e-12 {
        Ok(format!("max reconstruction error {worst:e}"))
    } else {
        Err(format!("reconstruction error {worst:e}"))
    }
}

fn hull1(o: &SelftestOptions) -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let mut rng = trial_rng(o.seed, 0);
    let mut inside = 0;
    for _ in 0..10_000 {
        let p = H1Point::new(rng.gen(), rng.gen(), rng.gen());
        let a = h1_contains(&p, &tol).passed();
        if a != witness_is_dnn(&p, &tol) {
            return Err(format!("disagreement at {p:?}"));
        }
        inside += a as usize;
    }
    Ok(format!("{inside}/10000 inside"))
}

fn atoms(o: &SelftestOptions) -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let mut rng = trial_rng(o.seed, 0);
    for _ in 0..2_000 {
        let z = crate::hull2::atom_lift(&random_atom(&mut rng));
        for s in System::ALL {
            let c = check(&z, s, &tol).map_err(|e| e.to_string())?;
            if !c.passed() {
                return Err(format!("{s} rejects atom {z:?}: {}", c.report));
            }
        }
    }
    Ok("2000 atoms pass every system".into())
}

fn decomposition(o: &SelftestOptions) -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let mut rng = trial_rng(o.seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let z = disjunctive_mixture(&mut rng);
        let d = decompose_with(&z, o.lambda_rule, &tol).map_err(|e| format!("{e} at {z:?}"))?;
        worst = worst.max(d.residual);
    }
    Ok(format!("max residual {worst:e}"))
}

fn redundant_3x3(o: &SelftestOptions) -> Result<String, String> {
    let mut rng = trial_rng(o.seed, 0);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let z = linear_feasible(&mut rng);
        let m = primed(&z, PsdCondition::ThreeByThree);
        let rel = m.eig_min().0 / (1.0 + m.norm());
        if rel < -1e-8 {
            return Err(format!("(3x3') eigenvalue {rel:e} at {z:?}"));
        }
        worst = worst.min(rel);
    }
    Ok(format!("min relative eigenvalue {worst:e}"))
}

fn repair_suite(o: &SelftestOptions) -> Result<String, String> {
    let tol = TolerancePolicy::default();
    let strict = TolerancePolicy::new(1e-8, 1e-8);
    let pts = sample_lacking(o.seed, 200);
    if pts.len() < 200 {
        return Err(format!("sampler produced {} of 200 points", pts.len()));
    }
    for z in &pts {
        let r = repair(z, &tol).map_err(|e| format!("{e} at {z:?}"))?;
        let c = check(&r, System::NoBeta, &strict).map_err(|e| e.to_string())?;
        if !c.passed() {
            return Err(format!("repaired point fails: {}", c.report));
        }
    }
    Ok("200 lacking points repaired".into())
}

fn solver(o: &SelftestOptions) -> Result<String, String> {
    let mut worst = 0.0f64;
    for t in 0..20 {
        let obj = random_objective(&mut trial_rng(o.seed, t), None);
        let (ov, _) = support_atoms(&obj, false).map_err(|e| e.to_string())?;
        for s in [System::Disjunctive, System::NoBeta, System::Minimal] {
            let r = support(s, &obj, 1e-6).map_err(|e| format!("{s}: {e}"))?;
            let gap = (r.value - ov).abs();
            if gap > GAP_THRESHOLD {
                return Err(format!("{s} differs from the hull by {gap:e} on {:?}", obj.coeffs()));
            }
            worst = worst.max(gap);
        }
    }
    Ok(format!("max |gap| {worst:e}"))
}

fn conjecture(o: &SelftestOptions) -> Result<String, String> {
    let rows = run_trials(&TrialConfig::conjecture(50, o.seed, 1e-6));
    let bad: Vec<_> = rows.iter().filter(|r| r.status != Status::Ok).collect();
    match bad.first() {
        None => Ok("50 trials, no counterexample".into()),
        Some(r) => Err(format!("{} rows not ok, first: {}", bad.len(), crate::experiments::dump_row(r))),
    }
}

fn pointfile(o: &SelftestOptions) -> Result<String, String> {
    let mut rng = trial_rng(o.seed, 0);
    for _ in 0..1_000 {
        let z = disjunctive_mixture(&mut rng);
        let p = PointFile::from_lifted(&z);
        let q = PointFile::parse(&p.to_json()).map_err(|e| e.to_string())?;
        if q != p {
            return Err(format!("round trip changed {p:?} into {q:?}"));
        }
    }
    Ok("1000 round trips".into())
}
