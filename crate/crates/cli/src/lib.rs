//! `efx` command-line front end. [`run`] parses arguments and returns the
//! process exit code; `main` only forwards it.
//!
//! Exit codes: 0 success, 1 predicate failed (or hunt failures), 2 parse or
//! validation error, 3 structural precondition, 4 internal invariant breach,
//! 5 enumeration cap exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use efx_core::envy::first_strong_envy;
use efx_core::format::{allocation_to_json, instance_to_json, read_allocation, read_instance};
use efx_core::gen::{generate, GenParams};
use efx_core::hunt::{hunt, HuntConfig, HuntReport};
use efx_core::model::allocation_problem;
use efx_core::oracle::{is_mms_feasible, SolveFn, DEFAULT_ORACLE_CAP};
use efx_core::pr::{DEFAULT_ENUMERATION_CAP, DEFAULT_ITERATION_LIMIT};
use efx_core::solver::{DEFAULT_MMS_CAP, DEFAULT_SUBSET_CAP};
use efx_core::{solve, EfxError, PrLimits, PrStrategy, SolverConfig, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_STRUCTURE: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;
pub const EXIT_CAP: i32 = 5;

/// Exit code for a library error.
pub fn exit_code(e: &EfxError) -> i32 {
    match e {
        EfxError::Invalid(_) | EfxError::Json(_) | EfxError::Io(_) | EfxError::Overflow(_) => {
            EXIT_PARSE
        }
        EfxError::Structure(_) => EXIT_STRUCTURE,
        EfxError::Invariant(_) | EfxError::Precondition(_) => EXIT_INVARIANT,
        EfxError::CapExceeded { .. } => EXIT_CAP,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "efx",
    version,
    about = "EFX allocations when all but two agents share a valuation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute and certify an EFX allocation.
    Solve(SolveArgs),
    /// Check whether an allocation is EFX.
    Verify(VerifyArgs),
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Test every valuation of an instance for a property.
    Check(CheckArgs),
    /// Cross-check the solver against the exhaustive oracle on random instances.
    Hunt(HuntArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrArg {
    Brute,
    Local,
}

#[derive(Args, Debug, Clone)]
pub struct Caps {
    /// Largest number of assignments a brute-force partition search may scan.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: u64,
    /// Local-search moves before falling back to brute force.
    #[arg(long, default_value_t = DEFAULT_ITERATION_LIMIT)]
    pub iteration_limit: usize,
    /// Largest `m` for checks over all 2^m bundles.
    #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
    pub subset_cap: usize,
    /// Largest `m` for the 3^m MMS-feasibility check.
    #[arg(long, default_value_t = DEFAULT_MMS_CAP)]
    pub mms_cap: usize,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// Allocation file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Solve the perturbed instance so degenerate inputs are accepted.
    #[arg(long)]
    pub perturb: bool,
    #[arg(long, value_enum, default_value_t = PrArg::Local)]
    pub pr: PrArg,
    /// Write the case trace here, one JSON object per line.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Accepted for uniformity; solving is deterministic and draws no randomness.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub allocation: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub classes: u8,
    #[arg(long, default_value_t = 100)]
    pub max_value: Value,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit b's valuation as a random monotone table.
    #[arg(long)]
    pub b_table: bool,
    /// Emit c's valuation as an MMS-feasible table.
    #[arg(long)]
    pub c_table: bool,
    /// Instance file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "property", required = true, multiple = false, args = ["mms", "monotone", "nondegenerate"])]
pub struct CheckArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long)]
    pub mms: bool,
    #[arg(long)]
    pub monotone: bool,
    #[arg(long)]
    pub nondegenerate: bool,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Args, Debug)]
pub struct HuntArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_value: Value,
    #[arg(long, value_enum, default_value_t = PrArg::Local)]
    pub pr: PrArg,
    /// Largest number of allocations the oracle may scan per instance.
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    pub oracle_cap: u64,
    #[command(flatten)]
    pub caps: Caps,
}

fn config(pr: PrArg, perturb: bool, caps: &Caps) -> SolverConfig {
    SolverConfig {
        pr_strategy: match pr {
            PrArg::Brute => PrStrategy::Brute,
            PrArg::Local => PrStrategy::Local,
        },
        pr_limits: PrLimits {
            enumeration_cap: caps.enumeration_cap,
            iteration_limit: caps.iteration_limit,
        },
        auto_perturb: perturb,
        subset_cap: caps.subset_cap,
        mms_cap: caps.mms_cap,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Check(a) => cmd_check(&a),
        Command::Hunt(a) => cmd_hunt(
            &a,
            &solve,
            &mut io::stdout().lock(),
            &mut io::stderr().lock(),
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> efx_core::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

pub fn cmd_solve(a: &SolveArgs) -> efx_core::Result<i32> {
    let inst = read_instance(&a.input)?;
    let config = config(a.pr, a.perturb, &a.caps);
    let solution = solve(&inst, &config)?;
    if let Some(path) = &a.trace {
        let mut lines = String::new();
        for event in &solution.trace {
            lines.push_str(&serde_json::to_string(event).map_err(EfxError::Json)?);
            lines.push('\n');
        }
        fs::write(path, lines)?;
    }
    emit(
        a.output.as_deref(),
        &allocation_to_json(&inst, &solution.allocation, Some(true)),
    )?;
    eprintln!(
        "solved {} agents, {} goods in {} steps{}",
        inst.agent_count(),
        inst.goods(),
        solution.trace.len(),
        if solution.perturbed {
            " (perturbed)"
        } else {
            ""
        }
    );
    Ok(EXIT_OK)
}

pub fn cmd_verify(a: &VerifyArgs) -> efx_core::Result<i32> {
    let inst = read_instance(&a.input)?;
    let x = read_allocation(&a.allocation, &inst)?;
    if let Some(problem) = allocation_problem(&inst, &x) {
        return Err(EfxError::Invalid(format!("not an allocation: {problem}")));
    }
    match first_strong_envy(&inst, &x)? {
        None => {
            println!("EFX");
            Ok(EXIT_OK)
        }
        Some(w) => {
            let names = inst.agents();
            println!(
                "not EFX: {} strongly envies {} (still envies after removing good {})",
                names[w.agent].name, names[w.envied_agent].name, w.good
            );
            Ok(EXIT_FAIL)
        }
    }
}

pub fn cmd_gen(a: &GenArgs) -> efx_core::Result<i32> {
    let params = GenParams {
        table_b: a.b_table,
        table_c: a.c_table,
        ..GenParams::additive(a.n, a.m, a.classes, a.max_value, a.seed)
    };
    let inst = generate(&params)?;
    emit(a.output.as_deref(), &instance_to_json(&inst))?;
    Ok(EXIT_OK)
}

pub fn cmd_check(a: &CheckArgs) -> efx_core::Result<i32> {
    let inst = read_instance(&a.input)?;
    let mut all = true;
    for (id, v) in inst.valuations() {
        let (pass, detail) = if a.mms {
            let r = is_mms_feasible(v, a.caps.mms_cap)?;
            (r.feasible, format!(" (strict: {})", r.strict))
        } else if a.monotone {
            (v.is_monotone(), String::new())
        } else {
            (v.is_nondegenerate(a.caps.subset_cap)?, String::new())
        };
        all &= pass;
        let verdict = if pass { "pass" } else { "fail" };
        println!("{id}: {verdict}{detail}");
    }
    Ok(if all { EXIT_OK } else { EXIT_FAIL })
}

/// Hunt with an explicit solver and output streams, so tests can substitute a
/// broken solver and read the report. Random integer values are nearly always
/// degenerate, so every instance is solved in perturbed form.
pub fn cmd_hunt(
    a: &HuntArgs,
    solve_fn: &SolveFn,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> efx_core::Result<i32> {
    let config = HuntConfig {
        n: a.n,
        m: a.m,
        max_value: a.max_value,
        count: a.count,
        seed: a.seed,
        solver: config(a.pr, true, &a.caps),
        oracle_cap: a.oracle_cap,
    };
    let report = hunt(&config, solve_fn);
    write_report(&report, out)?;
    for f in &report.failures {
        writeln!(err, "failure at seed {}: {}", f.seed, f.message)?;
        writeln!(
            err,
            "  reproduce: efx gen --n {} --m {} --classes 3 --max-value {} --seed {}",
            a.n, a.m, a.max_value, f.seed
        )?;
    }
    Ok(if report.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn write_report(report: &HuntReport, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "instances: {}", report.instances)?;
    writeln!(out, "failures: {}", report.failures.len())?;
    for (label, count) in &report.label_counts {
        writeln!(out, "{label}: {count}")?;
    }
    Ok(())
}
