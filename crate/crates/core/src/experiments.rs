//! Trial harnesses comparing solver supports with the exact hull support.

use std::fmt;
use std::io::{self, Write};

use crate::error::Error;
use crate::hull2::{Atom, LiftedPoint, System};
use crate::oracle::{support_atoms, Objective};
use crate::par;
use crate::sample::{random_objective, trial_rng};
use crate::solver::{support, SolveResult};

/// Rows whose gap exceeds this are counterexamples.
pub const GAP_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Counterexample,
    SolverError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Counterexample => "counterexample",
            Status::SolverError => "solver_error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial_id: u64,
    pub seed: u64,
    pub objective: Objective,
    pub oracle_value: f64,
    pub repr_value: f64,
    /// `repr_value - oracle_value`.
    pub gap: f64,
    pub solve_iterations: usize,
    pub status: Status,
    pub oracle_argmax: Option<Atom>,
    pub repr_argmax: Option<LiftedPoint>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub accuracy: f64,
    pub system: System,
    /// Replaces the drawn `c_Y` in every objective.
    pub c_y12: Option<f64>,
}

impl TrialConfig {
    /// Single-PSD system against the hull, all eight coefficients random.
    pub fn exactness(trials: u64, seed: u64, accuracy: f64) -> Self {
        Self { trials, seed, accuracy, system: System::Minimal, c_y12: None }
    }

    /// Weak-PSD system against the hull with `c_Y = 0`.
    pub fn conjecture(trials: u64, seed: u64, accuracy: f64) -> Self {
        Self { trials, seed, accuracy, system: System::Conjecture, c_y12: Some(0.0) }
    }
}

/// Compares `system` with the hull on one objective.
pub fn compare(trial_id: u64, seed: u64, obj: &Objective, system: System, accuracy: f64) -> TrialRow {
    let restrict = obj.c_y12 == 0.0;
    let mut row = TrialRow {
        trial_id,
        seed,
        objective: *obj,
        oracle_value: f64::NAN,
        repr_value: f64::NAN,
        gap: f64::NAN,
        solve_iterations: 0,
        status: Status::SolverError,
        oracle_argmax: None,
        repr_argmax: None,
        error: None,
    };
    let (ov, atom) = match support_atoms(obj, restrict) {
        Ok(r) => r,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.oracle_value = ov;
    row.oracle_argmax = Some(atom);
    match support(system, obj, accuracy) {
        Ok(SolveResult { value, argmax, iterations, .. }) => {
            row.repr_value = value;
            row.gap = value - ov;
            row.solve_iterations = iterations;
            row.repr_argmax = Some(argmax);
            row.status = if row.gap.abs() > GAP_THRESHOLD { Status::Counterexample } else { Status::Ok };
        }
        Err(e) => {
            if let Error::NonConvergence { iterations, .. } = e {
                row.solve_iterations = iterations;
            }
            row.error = Some(e.to_string());
        }
    }
    row
}

pub fn run_trial(cfg: &TrialConfig, trial_id: u64) -> TrialRow {
    let obj = random_objective(&mut trial_rng(cfg.seed, trial_id), cfg.c_y12);
    compare(trial_id, cfg.seed, &obj, cfg.system, cfg.accuracy)
}

/// All trials, sorted by `trial_id`.
pub fn run_trials(cfg: &TrialConfig) -> Vec<TrialRow> {
    par::map_indexed(cfg.trials as usize, |i| run_trial(cfg, i as u64))
}

pub fn run_trials_seq(cfg: &TrialConfig) -> Vec<TrialRow> {
    par::map_indexed_seq(cfg.trials as usize, |i| run_trial(cfg, i as u64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub max_abs_gap: f64,
    pub counterexamples: usize,
    pub solver_errors: usize,
    pub mean_iterations: f64,
}

impl Summary {
    pub fn of(rows: &[TrialRow]) -> Self {
        let solved: Vec<&TrialRow> = rows.iter().filter(|r| r.status != Status::SolverError).collect();
        Self {
            trials: rows.len(),
            max_abs_gap: solved.iter().map(|r| r.gap.abs()).fold(0.0, f64::max),
            counterexamples: rows.iter().filter(|r| r.status == Status::Counterexample).count(),
            solver_errors: rows.len() - solved.len(),
            mean_iterations: solved.iter().map(|r| r.solve_iterations as f64).sum::<f64>() / solved.len().max(1) as f64,
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} max|gap|={:e} counterexamples={} solver_errors={} mean_iterations={:.1}",
            self.trials, self.max_abs_gap, self.counterexamples, self.solver_errors, self.mean_iterations
        )
    }
}

/// 17 significant digits; exact for every finite `f64`.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "NaN".to_string()
    }
}

pub const CSV_HEADER: &str =
    "trial_id,seed,c_x1,c_x2,Q11,Q12,Q22,c_y1,c_y2,c_Y,oracle_value,repr_value,gap,solve_iterations,status";

pub fn csv_line(r: &TrialRow) -> String {
    let mut fields = vec![r.trial_id.to_string(), r.seed.to_string()];
    fields.extend(r.objective.coeffs().iter().map(|c| fmt17(*c)));
    fields.extend([fmt17(r.oracle_value), fmt17(r.repr_value), fmt17(r.gap)]);
    fields.push(r.solve_iterations.to_string());
    fields.push(r.status.to_string());
    fields.join(",")
}

/// Header and rows, sorted by `trial_id`.
pub fn write_csv(mut w: impl Write, rows: &[TrialRow]) -> io::Result<()> {
    let mut sorted: Vec<&TrialRow> = rows.iter().collect();
    sorted.sort_by_key(|r| r.trial_id);
    writeln!(w, "{CSV_HEADER}")?;
    for r in sorted {
        writeln!(w, "{}", csv_line(r))?;
    }
    Ok(())
}

/// Everything needed to reproduce a counterexample row, as one JSON object.
pub fn dump_row(r: &TrialRow) -> String {
    let atom = r.oracle_argmax.map(|a| {
        serde_json::json!({ "y": a.ybits.y(), "x": a.x })
    });
    let v = serde_json::json!({
        "trial_id": r.trial_id,
        "seed": r.seed,
        "status": r.status.as_str(),
        "objective": r.objective.coeffs().map(fmt17),
        "oracle_value": fmt17(r.oracle_value),
        "repr_value": fmt17(r.repr_value),
        "gap": fmt17(r.gap),
        "solve_iterations": r.solve_iterations,
        "oracle_argmax": atom,
        "error": r.error,
    });
    let mut s = v.to_string();
    // spliced in by hand to keep the point's 17-digit formatting
    let point = r.repr_argmax.as_ref().map_or("null".to_string(), |z| crate::pointfile::PointFile::from_lifted(z).to_json());
    s.pop();
    format!("{s},\"repr_argmax\":{point}}}")
}

/// Directions with entries in `{-1, 0, 1}` on the first seven coefficients
/// and `c_Y = c_y12`, fewest nonzeros first.
pub fn integer_directions(c_y12: f64) -> Vec<Objective> {
    let mut dirs: Vec<[f64; 8]> = (0..3usize.pow(7))
        .map(|mut k| {
            let mut c = [0.0; 8];
            for slot in c.iter_mut().take(7) {
                *slot = (k % 3) as f64 - 1.0;
                k /= 3;
            }
            c[7] = c_y12;
            c
        })
        .collect();
    dirs.sort_by_key(|c| c[..7].iter().filter(|v| **v != 0.0).count());
    dirs.into_iter().map(Objective::from_coeffs).collect()
}

/// Directions examined per parallel batch by [`witness_search`].
const WITNESS_BATCH: usize = 256;

/// Searches for an objective where `system` exceeds the hull by more than
/// `threshold`: first `random` seeded draws with the forced `c_Y` values, then
/// the integer directions for each of them. Returns the first hit in that
/// order, or every row examined if none is found.
pub fn witness_search(
    system: System,
    c_y_values: &[f64],
    random: u64,
    seed: u64,
    accuracy: f64,
    threshold: f64,
) -> Result<TrialRow, Vec<TrialRow>> {
    let mut candidates: Vec<Objective> = Vec::new();
    for &cy in c_y_values {
        candidates.extend((0..random).map(|i| random_objective(&mut trial_rng(seed, i), Some(cy))));
    }
    for &cy in c_y_values {
        candidates.extend(integer_directions(cy));
    }
    let mut seen = Vec::with_capacity(candidates.len());
    for (b, batch) in candidates.chunks(WITNESS_BATCH).enumerate() {
        let base = (b * WITNESS_BATCH) as u64;
        let rows = par::map_indexed(batch.len(), |i| compare(base + i as u64, seed, &batch[i], system, accuracy));
        if let Some(hit) = rows.iter().find(|r| r.status != Status::SolverError && r.gap > threshold) {
            return Ok(hit.clone());
        }
        seen.extend(rows);
    }
    Err(seen)
}
