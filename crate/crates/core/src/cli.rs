//! Command-line driver. Exit codes: 0 pass, 1 verification failure, 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::algebra::AlgebraElement;
use crate::constructions::{construct_example8, construct_prop4, ExpectedPair};
use crate::diagonalize::{diagonalize_normal, diagonalize_selfadjoint, DiagonalizationResult};
use crate::eigen::{eig_hermitian, eig_normal};
use crate::error::{Error, Result};
use crate::io::{
    parse_problem, parse_solution, to_canonical_json, ProblemFile, ReportFile, SolutionFile, SCHEMA_VERSION,
};
use crate::operator::ModuleOperator;
use crate::verify::{verify_definition2, VerificationReport, DEFAULT_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hilbert-diag",
    version,
    about = "Algebra-valued diagonalization on finite Hilbert W*-modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Diagonalize an operator file and verify the result.
    Diagonalize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify an externally supplied diagonalization.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        solution: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Reproduce the M2(C) example with its three eigenvector families.
    Example8 {
        /// Also write the operator as a problem file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build the commutative counterexample operator and check its eigenpairs.
    Prop4 {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also write the operator as a problem file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Print the scalar spectrum of every flattened block.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

enum Failure {
    Input(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Diagonalize { input, tol, out: path } => cmd_diagonalize(&input, tol, path.as_deref(), out),
        Command::Verify { input, solution, tol } => cmd_verify(&input, &solution, tol, out),
        Command::Example8 { emit } => cmd_example8(emit.as_deref(), out),
        Command::Prop4 { n, alphas, tol, emit } => cmd_prop4(n, &alphas, tol, emit.as_deref(), out),
        Command::Spectrum { input, tol } => cmd_spectrum(&input, tol, out),
    };
    match outcome {
        Ok(()) => EXIT_PASS,
        Err(Failure::Verification) => EXIT_FAIL,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn read_problem(path: &Path) -> Result<ModuleOperator> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text).map_err(|e| match e {
        Error::Input { path: field, message } => Error::Input {
            path: format!("{}: {field}", path.display()),
            message,
        },
        Error::Json(j) => Error::Input {
            path: format!("{}: line {} column {}", path.display(), j.line(), j.column()),
            message: j.to_string(),
        },
        other => other,
    })
}

/// Self-adjoint operators get the ordered diagonalization, other normal ones the unordered one.
pub fn diagonalize_auto(k: &ModuleOperator, tol: f64) -> Result<DiagonalizationResult> {
    if k.self_adjoint_defect() <= tol * (1.0 + k.norm()) {
        diagonalize_selfadjoint(k, tol)
    } else {
        diagonalize_normal(k, tol)
    }
}

fn print_report(out: &mut dyn Write, report: &VerificationReport) -> std::io::Result<()> {
    for line in report.lines() {
        writeln!(out, "  {line}")?;
    }
    writeln!(out, "  overall: {}", if report.passed { "PASS" } else { "FAIL" })
}

fn cmd_diagonalize(input: &Path, tol: f64, path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let k = read_problem(input)?;
    let res = diagonalize_auto(&k, tol)?;
    let report = verify_definition2(&k, &res, tol)?;
    let file = ReportFile {
        schema: SCHEMA_VERSION,
        solution: SolutionFile::from_result(&res),
        report: report.clone(),
    };
    let text = to_canonical_json(&file)?;
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            writeln!(out, "wrote {} eigenpairs to {}", res.pairs.len(), p.display())?;
            print_report(out, &report)?;
        }
        None => write!(out, "{text}")?,
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_verify(input: &Path, solution: &Path, tol: f64, out: &mut dyn Write) -> CliResult {
    let k = read_problem(input)?;
    let text = std::fs::read_to_string(solution)?;
    let res = parse_solution(&text).map_err(|e| Error::Input {
        path: solution.display().to_string(),
        message: e.to_string(),
    })?;
    let report = verify_definition2(&k, &res, tol)?;
    writeln!(out, "verification of {} eigenpairs", res.pairs.len())?;
    print_report(out, &report)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn emit_problem(path: Option<&Path>, k: &ModuleOperator, out: &mut dyn Write) -> CliResult {
    if let Some(p) = path {
        std::fs::write(p, to_canonical_json(&ProblemFile::from_operator(k))?)?;
        writeln!(out, "wrote operator to {}", p.display())?;
    }
    Ok(())
}

fn left_residual(k: &ModuleOperator, p: &ExpectedPair) -> Result<f64> {
    Ok(k.apply(&p.vector)?.sub(&p.vector.left_action(&p.value)?)?.norm())
}

fn check(out: &mut dyn Write, ok: bool, text: String) -> std::io::Result<bool> {
    writeln!(out, "  {} {text}", if ok { "PASS" } else { "FAIL" })?;
    Ok(ok)
}

/// Spectrum of all `Λᵢ` restricted to their supports, sorted ascending.
pub fn restricted_spectrum(res: &DiagonalizationResult) -> Vec<f64> {
    let mut all: Vec<f64> = res.block_spectra().into_iter().flatten().map(|z| z.re).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    all
}

fn cmd_example8(emit: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let ex = construct_example8();
    let k = &ex.operator;
    emit_problem(emit, k, out)?;
    let mut ok = true;
    writeln!(out, "K = θ_{{x,x}} + θ_{{y,y}} on {}^2", ex.module.shape())?;

    writeln!(out, "family (x, y):")?;
    for p in &ex.generators {
        let r = left_residual(k, p)?;
        let gram = p.vector.inner_product(&p.vector)?;
        ok &= check(
            out,
            r <= 1e-12,
            format!("K({0}) = Λ_{0}·{0} with Λ_{0} = {1}, residual {r:.1e}", p.name, p.value),
        )?;
        ok &= check(
            out,
            !gram.is_projection(1e-9),
            format!("⟨{0},{0}⟩ = {gram} is not a projection", p.name),
        )?;
    }
    let (lx, ly) = (&ex.generators[0].value, &ex.generators[1].value);
    let incomparable = !lx.leq_default(ly)? && !ly.leq_default(lx)?;
    ok &= check(out, incomparable, "Λ_x and Λ_y are incomparable".to_string())?;

    writeln!(out, "family (x1, x2):")?;
    let one = AlgebraElement::identity(ex.module.shape());
    for p in &ex.units {
        let r = left_residual(k, p)?;
        let gram = p.vector.inner_product(&p.vector)?;
        ok &= check(
            out,
            r <= 1e-12,
            format!("K({0}) = Λ·{0} with Λ = {1}, residual {r:.1e}", p.name, p.value),
        )?;
        ok &= check(out, gram == one, format!("⟨{0},{0}⟩ = 1_A", p.name))?;
    }
    let ordered = ex.units[0].value.leq_default(&ex.units[1].value)?;
    ok &= check(out, ordered, format!("{} ≤ {}", ex.units[0].value, ex.units[1].value))?;

    writeln!(out, "family (x1', x2') spanning K-invariant submodules:")?;
    for p in &ex.invariant {
        let right = ModuleOperator::right_multiplication(&ex.module, &p.value)?;
        let r = k.apply(&p.vector)?.sub(&right.apply(&p.vector)?)?.norm();
        let gram = p.vector.inner_product(&p.vector)?;
        ok &= check(
            out,
            r <= 1e-12,
            format!("K({0}) = {0}·Λ with Λ = {1}, residual {r:.1e}", p.name, p.value),
        )?;
        ok &= check(
            out,
            !gram.is_projection(1e-9),
            format!("⟨{0},{0}⟩ = {gram} is not a unit or projection", p.name),
        )?;
    }

    writeln!(out, "unit family as a diagonalization:")?;
    let unit_report = verify_definition2(k, &ex.unit_solution()?, DEFAULT_TOL)?;
    print_report(out, &unit_report)?;
    ok &= unit_report.passed;

    writeln!(out, "diagonalizer output:")?;
    let res = diagonalize_selfadjoint(k, DEFAULT_TOL)?;
    for p in &res.pairs {
        writeln!(
            out,
            "  Λ_{} = {} ({}), p = {}",
            p.label,
            p.value,
            p.class.as_str(),
            p.support
        )?;
    }
    let report = verify_definition2(k, &res, DEFAULT_TOL)?;
    print_report(out, &report)?;
    ok &= report.passed;
    let spectrum = restricted_spectrum(&res);
    let matches = spectrum.len() == 4
        && spectrum
            .iter()
            .zip([1.0, 4.0, 4.0, 9.0])
            .all(|(a, b)| (a - b).abs() <= 1e-12);
    let shown: Vec<String> = spectrum.iter().map(|v| format!("{v:.6}")).collect();
    ok &= check(
        out,
        matches,
        format!("spectrum multiset {{{}}} = {{1, 4, 4, 9}}", shown.join(", ")),
    )?;

    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_prop4(n: usize, alphas: &[f64], tol: f64, emit: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let pr = construct_prop4(n, alphas)?;
    let k = &pr.operator;
    emit_problem(emit, k, out)?;
    let mut ok = true;
    writeln!(
        out,
        "K(e1) = Σ αₙ pₙ eₙ, K(eⱼ) = αⱼ pⱼ e1 on ({})^{n}",
        pr.module.shape()
    )?;
    writeln!(out, "listed eigenpairs:")?;
    for p in &pr.expected {
        let r = left_residual(k, p)?;
        ok &= check(out, r <= tol, format!("{} ↦ {}, residual {r:.1e}", p.name, p.value))?;
    }
    let listed = verify_definition2(k, &pr.expected_solution()?, tol)?;
    writeln!(out, "listed eigenpairs as a diagonalization:")?;
    print_report(out, &listed)?;
    ok &= listed.passed;

    writeln!(out, "diagonalizer output:")?;
    let res = diagonalize_selfadjoint(k, tol)?;
    for p in &res.pairs {
        writeln!(out, "  Λ_{} = {} ({})", p.label, p.value, p.class.as_str())?;
    }
    let report = verify_definition2(k, &res, tol)?;
    print_report(out, &report)?;
    ok &= report.passed;
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_spectrum(input: &Path, tol: f64, out: &mut dyn Write) -> CliResult {
    let k = read_problem(input)?;
    let self_adjoint = k.self_adjoint_defect() <= tol * (1.0 + k.norm());
    for (j, &size) in k.module().shape().block_sizes().iter().enumerate() {
        let m = k.flatten_block(j);
        let values: Vec<String> = if self_adjoint {
            eig_hermitian(&m, tol.max(1e-12))?
                .values
                .iter()
                .map(|v| format!("{v:.12}"))
                .collect()
        } else {
            eig_normal(&m, tol.max(1e-12))?
                .values
                .iter()
                .map(|v| format!("{:.12}{:+.12}i", v.re, v.im))
                .collect()
        };
        writeln!(out, "block {j} (M{size}): {}", values.join(" "))?;
    }
    Ok(())
}
