//! Command-line front end. Exit codes: 0 pass, 1 a check failed, 2 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fixtures::{
    builtin_group, builtin_groupoids, builtin_reps, group_algebra_bundle, mutant, mutants, normalized,
};
use crate::groupoid::{FiniteGroupoid, GroupTable};
use crate::io::{emit_string, load, save, Instance, ReportFile};
use crate::kernel::DEFAULT_TOL;
use crate::report::VerificationReport;
use crate::selftest;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Environment variable giving the worker thread count.
pub const THREADS_VAR: &str = "QGROUPOID_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qgroupoid", version, about = "Build and verify finite quantum groupoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance file.
    Generate(GenerateArgs),
    /// Verify an instance file.
    Verify(VerifyArgs),
    /// Run the seeded property suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Trivial,
    Pair,
    Group,
    Action,
    Union,
    Quantum,
    Representation,
    Mutant,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub kind: GenerateKind,
    /// Number of objects for `pair`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Group table for `group`: `zN` or `s3`.
    #[arg(long)]
    pub table: Option<String>,
    /// Group for `quantum`: `zN` or `s3`.
    #[arg(long)]
    pub group: Option<String>,
    /// Built-in groupoid for `representation`, e.g. `z2`, `s3`, `pair3`.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Representation name for `representation`, e.g. `trivial`, `irrep1`.
    #[arg(long)]
    pub rep: Option<String>,
    /// Mutant name for `mutant`.
    #[arg(long)]
    pub name: Option<String>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Keep only checks whose name contains one of these fragments.
    #[arg(long, value_delimiter = ',')]
    pub checks: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

/// Parses arguments and runs, writing human output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    let result = match cli.command {
        Command::Generate(a) => generate(&a, out).map(|_| EXIT_PASS),
        Command::Verify(a) => verify(&a, out),
        Command::Selftest(a) => run_selftest(&a, out),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::BadParams(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(Error::BadParams(format!("{THREADS_VAR} must be positive")));
    }
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::BadParams(format!("--{flag} is required")))
}

pub fn build_instance(a: &GenerateArgs) -> Result<Instance> {
    let groupoid = |g: FiniteGroupoid| Instance::Groupoid { haar: normalized(&g), groupoid: g };
    Ok(match a.kind {
        GenerateKind::Trivial => groupoid(FiniteGroupoid::trivial()),
        GenerateKind::Pair => {
            let n = a.n.ok_or_else(|| Error::BadParams("--n is required".into()))?;
            groupoid(FiniteGroupoid::pair(n)?)
        }
        GenerateKind::Group => groupoid(FiniteGroupoid::group(&GroupTable::builtin(required(&a.table, "table")?)?)),
        GenerateKind::Action => groupoid(crate::fixtures::z2_swap_action()),
        GenerateKind::Union => groupoid(FiniteGroupoid::disjoint_union(
            &FiniteGroupoid::pair(2)?,
            &FiniteGroupoid::group(&GroupTable::cyclic(2)?),
        )),
        GenerateKind::Quantum => {
            let name = required(&a.group, "group")?;
            let (table, irreps) = builtin_group(name)?;
            Instance::Bundle(group_algebra_bundle(&table, &irreps, &format!("C[{name}]"))?)
        }
        GenerateKind::Representation => {
            let fixture = required(&a.fixture, "fixture")?;
            let rep_name = a.rep.as_deref().unwrap_or("trivial");
            let (_, g) = builtin_groupoids()
                .into_iter()
                .find(|(n, _)| n == fixture)
                .ok_or_else(|| Error::BadParams(format!("unknown fixture '{fixture}'")))?;
            let (_, rep) = builtin_reps(fixture, &g)
                .into_iter()
                .find(|(n, _)| n == rep_name)
                .ok_or_else(|| Error::BadParams(format!("fixture '{fixture}' has no representation '{rep_name}'")))?;
            Instance::Representation { haar: normalized(&g), rep }
        }
        GenerateKind::Mutant => {
            let name = required(&a.name, "name")?;
            let m = mutant(name).ok_or_else(|| {
                let known: Vec<&str> = mutants().iter().map(|m| m.name).collect();
                Error::BadParams(format!("unknown mutant '{name}' (known: {})", known.join(", ")))
            })?;
            m.instance().ok_or_else(|| Error::BadParams(format!("mutant '{name}' has no file form")))?
        }
    })
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let inst = build_instance(a)?;
    match &a.out {
        Some(path) => save(&inst, path),
        None => out.write_all(emit_string(&inst).as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path, out: &mut dyn Write) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    if path == Path::new("-") {
        out.write_all(s.as_bytes()).map_err(|e| Error::Io(e.to_string()))
    } else {
        std::fs::write(path, s).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Human-readable report: one line per check, then the summary.
pub fn render(r: &VerificationReport) -> String {
    let mut s = format!("{}\ntolerance {:e}\n", r.subject, r.tolerance);
    for n in &r.notes {
        s.push_str(&format!("note: {n}\n"));
    }
    for w in &r.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    for c in &r.checks {
        s.push_str(&format!("{} {:<50} {:.3e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.max_residual));
        if let Some(w) = &c.witness {
            s.push_str(&format!("  [{w}]"));
        }
        s.push('\n');
    }
    let failed = r.failing().count();
    s.push_str(&format!(
        "summary: {} ({} checks, {failed} failed, max residual {:.3e})\n",
        if r.pass() { "pass" } else { "fail" },
        r.checks.len(),
        r.max_residual()
    ));
    s
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Error::BadParams(format!("--tol must be positive, got {}", a.tol)));
    }
    let inst = load(&a.input)?;
    let mut report = inst.verify(a.tol);
    report.filter(&a.checks);
    let file = ReportFile::new(a.input.display().to_string(), inst.kind(), &report);
    match &a.json {
        Some(p) if p == Path::new("-") => write_json(&file, p, out)?,
        Some(p) => {
            write_json(&file, p, out)?;
            out.write_all(render(&report).as_bytes()).map_err(|e| Error::Io(e.to_string()))?;
        }
        None => out.write_all(render(&report).as_bytes()).map_err(|e| Error::Io(e.to_string()))?,
    }
    Ok(if report.pass() { EXIT_PASS } else { EXIT_FAIL })
}

fn run_selftest(a: &SelftestArgs, out: &mut dyn Write) -> Result<i32> {
    let report = selftest::run(a.seed, a.tol, a.inject_fault.as_deref())?;
    let table = || {
        let mut s = format!("selftest seed {}\n", report.seed);
        for c in &report.cases {
            s.push_str(&format!(
                "{} {:<40} expect {:<4} {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                if c.expect_pass { "pass" } else { "fail" },
                c.detail
            ));
        }
        s.push_str(&format!("summary: {}\n", if report.pass { "pass" } else { "fail" }));
        s
    };
    match &a.json {
        Some(p) if p == Path::new("-") => write_json(&report, p, out)?,
        Some(p) => {
            write_json(&report, p, out)?;
            out.write_all(table().as_bytes()).map_err(|e| Error::Io(e.to_string()))?;
        }
        None => out.write_all(table().as_bytes()).map_err(|e| Error::Io(e.to_string()))?,
    }
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}
