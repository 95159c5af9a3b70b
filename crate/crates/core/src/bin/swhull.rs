use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use swhull::experiments::{self, dump_row, run_trials, witness_search, Status, Summary, TrialConfig, TrialRow};
use swhull::hull2::{check, LambdaRule, System};
use swhull::oracle::{support_atoms, Objective};
use swhull::pointfile::PointFile;
use swhull::repair::repair;
use swhull::selftest::{self, SelftestOptions};
use swhull::solver::support;
use swhull::{Error, Report, TolerancePolicy};

#[derive(Parser)]
#[command(name = "swhull", version, about = "Convex-hull representations for quadratic optimization with switching variables")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SystemArg {
    Disj,
    Nobeta,
    Minimal,
    Conjecture,
}

impl From<SystemArg> for System {
    fn from(s: SystemArg) -> Self {
        match s {
            SystemArg::Disj => System::Disjunctive,
            SystemArg::Nobeta => System::NoBeta,
            SystemArg::Minimal => System::Minimal,
            SystemArg::Conjecture => System::Conjecture,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Corrected,
    Literal,
}

#[derive(Subcommand)]
enum Cmd {
    /// Membership test for a point file (`-` reads stdin).
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "minimal")]
        system: SystemArg,
        #[arg(long, default_value_t = 1e-9)]
        psd_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        eq_tol: f64,
    },
    /// Completes a point of the single-PSD system to the four-PSD system.
    Repair {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Support value of a representation in one direction, next to the hull's.
    Support {
        /// c_x1,c_x2,Q11,Q12,Q22,c_y1,c_y2,c_Y
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        objective: Vec<f64>,
        #[arg(long, value_enum, default_value = "minimal")]
        system: SystemArg,
        #[arg(long, default_value_t = 1e-6)]
        accuracy: f64,
    },
    /// Random objectives: single-PSD support against the hull.
    Exactness {
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        accuracy: f64,
        #[arg(long, value_enum, default_value = "minimal")]
        system: SystemArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random objectives with c_Y = 0: weak-PSD support against the hull.
    Conjecture {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        accuracy: f64,
        #[arg(long, value_enum, default_value = "conjecture")]
        system: SystemArg,
        /// Forces this c_Y instead of 0.
        #[arg(long, allow_hyphen_values = true)]
        c_y: Option<f64>,
        /// Search for a direction with a strict gap instead of running trials:
        /// random draws and then integer directions, for c_Y = +1 then -1
        /// (or only the forced c_Y).
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs every property suite with timing.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Weight rule for the decomposition suite; `literal` is a mutation check.
        #[arg(long, value_enum, default_value = "corrected")]
        lambda_rule: RuleArg,
    },
}

fn read_input(path: &Path) -> io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn load_point(path: &Path) -> Result<PointFile, String> {
    let text = read_input(path).map_err(|e| format!("{}: {e}", path.display()))?;
    PointFile::parse(&text).map_err(|e| e.to_string())
}

fn write_output(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn print_slacks(r: &Report, w: &mut impl Write) {
    for s in &r.slacks {
        let _ = writeln!(w, "{:<5} {:<40} {:>24}", if s.holds() { "ok" } else { "FAIL" }, s.name, experiments::fmt17(s.value));
    }
}

fn cmd_check(file: &Path, system: System, tol: TolerancePolicy) -> ExitCode {
    let p = match load_point(file) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let z = match (p.to_lifted(), system) {
        (Ok(z), _) => z,
        (Err(e), _) => {
            eprintln!("error: {e} for system {system}");
            return ExitCode::from(2);
        }
    };
    match check(&z, system, &tol) {
        Ok(c) => {
            print_slacks(&c.report, &mut io::stdout());
            for m in &c.schur_mismatches {
                println!("schur mismatch: {}", m.name());
            }
            let pass = c.passed();
            println!("{system}: {}", if pass { "pass" } else { "FAIL" });
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ (Error::Precondition(_) | Error::Invalid(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_repair(file: &Path, out: Option<&Path>) -> ExitCode {
    let tol = TolerancePolicy::default();
    let z = match load_point(file).and_then(|p| p.to_lifted().map_err(|e| e.to_string())) {
        Ok(z) => z,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pre = check(&z, System::Minimal, &tol).expect("alpha present");
    if !pre.passed() {
        print_slacks(&pre.report, &mut io::stderr());
        eprintln!("input fails minimal; not repaired");
        return ExitCode::from(1);
    }
    let repaired = match repair(&z, &tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let post = check(&repaired, System::NoBeta, &tol).expect("alpha present");
    if let Err(e) = write_output(out, &(PointFile::from_lifted(&repaired).to_json() + "\n")) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if post.passed() {
        ExitCode::SUCCESS
    } else {
        print_slacks(&post.report, &mut io::stderr());
        ExitCode::from(1)
    }
}

fn cmd_support(coeffs: &[f64], system: System, accuracy: f64) -> ExitCode {
    let Ok(c) = <[f64; 8]>::try_from(coeffs) else {
        eprintln!("error: --objective needs 8 coefficients");
        return ExitCode::from(2);
    };
    let obj = Objective::from_coeffs(c);
    let (ov, atom) = match support_atoms(&obj, false) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match support(system, &obj, accuracy) {
        Ok(r) => {
            println!("{system}: {} ({} iterations, certified gap {:e})", experiments::fmt17(r.value), r.iterations, r.certified_gap);
            println!("hull: {} at y = {:?}, x = {:?}", experiments::fmt17(ov), atom.ybits.y(), atom.x);
            println!("difference: {:e}", r.value - ov);
            println!("argmax: {}", PointFile::from_lifted(&r.argmax).to_json());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn report_rows(rows: &[TrialRow], out: Option<&Path>) -> io::Result<Summary> {
    let mut buf = Vec::new();
    experiments::write_csv(&mut buf, rows)?;
    write_output(out, &String::from_utf8(buf).expect("ascii"))?;
    for r in rows.iter().filter(|r| r.status != Status::Ok) {
        eprintln!("{}: {}", r.status, dump_row(r));
    }
    let s = Summary::of(rows);
    eprintln!("{s}");
    Ok(s)
}

fn cmd_trials(cfg: &TrialConfig, out: Option<&Path>, strict: bool) -> ExitCode {
    if cfg.trials == 0 {
        eprintln!("error: --trials must be at least 1");
        return ExitCode::from(2);
    }
    let rows = run_trials(cfg);
    match report_rows(&rows, out) {
        Ok(s) if strict && (s.counterexamples > 0 || s.solver_errors > 0) => ExitCode::from(1),
        Ok(s) if s.solver_errors > 0 => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_witness(system: System, c_y: Option<f64>, trials: u64, seed: u64, accuracy: f64, out: Option<&Path>) -> ExitCode {
    let values = c_y.map_or(vec![1.0, -1.0], |v| vec![v]);
    match witness_search(system, &values, trials, seed, accuracy, 1e-4) {
        Ok(hit) => {
            if let Err(e) = report_rows(std::slice::from_ref(&hit), out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            println!("witness: {}", dump_row(&hit));
            ExitCode::SUCCESS
        }
        Err(rows) => {
            let best = rows.iter().filter(|r| r.status != Status::SolverError).map(|r| r.gap).fold(f64::NEG_INFINITY, f64::max);
            eprintln!("no witness among {} directions for c_Y in {values:?}; largest gap {best:e}", rows.len());
            ExitCode::from(1)
        }
    }
}

fn cmd_selftest(seed: u64, rule: LambdaRule) -> ExitCode {
    let opts = SelftestOptions { seed, lambda_rule: rule };
    let start = std::time::Instant::now();
    let outcomes = selftest::run(&opts, |o| {
        println!("{:<14} {:<4} {:>9.3}s  {}", o.name, if o.passed { "ok" } else { "FAIL" }, o.elapsed.as_secs_f64(), o.detail);
    });
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} suites, {failed} failed, {:.3}s", outcomes.len(), start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Check { file, system, psd_tol, eq_tol } => {
            if !(psd_tol > 0.0 && eq_tol > 0.0) {
                eprintln!("error: tolerances must be positive");
                return ExitCode::from(2);
            }
            cmd_check(&file, system.into(), TolerancePolicy::new(psd_tol, eq_tol))
        }
        Cmd::Repair { file, out } => cmd_repair(&file, out.as_deref()),
        Cmd::Support { objective, system, accuracy } => cmd_support(&objective, system.into(), accuracy),
        Cmd::Exactness { trials, seed, accuracy, system, out } => {
            let cfg = TrialConfig { system: system.into(), ..TrialConfig::exactness(trials, seed, accuracy) };
            cmd_trials(&cfg, out.as_deref(), true)
        }
        Cmd::Conjecture { trials, seed, accuracy, system, c_y, witness, out } => {
            if witness {
                return cmd_witness(system.into(), c_y, trials, seed, accuracy, out.as_deref());
            }
            let mut cfg = TrialConfig::conjecture(trials, seed, accuracy);
            cfg.system = system.into();
            if c_y.is_some() {
                cfg.c_y12 = c_y;
            }
            cmd_trials(&cfg, out.as_deref(), false)
        }
        Cmd::Selftest { seed, lambda_rule } => cmd_selftest(
            seed,
            match lambda_rule {
                RuleArg::Corrected => LambdaRule::Corrected,
                RuleArg::Literal => LambdaRule::Literal,
            },
        ),
    }
}
