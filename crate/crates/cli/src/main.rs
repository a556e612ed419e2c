use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use routenet::lang::{parse_program, parse_region_ctx, typecheck_amadio, values, EvalError, RegionCtx, TypeError};
use routenet::multirel::Multirelation;
use routenet::proofnet::{parse, serialize, serialize_net, to_dot};
use routenet::rewrite::{deep_normalize, normalize, RewriteError};
use routenet::routing::{build_area, RoutingArea};
use routenet::translate::{compile, TranslateError};
use routenet::verify::{run_suite, SUITES};

const USAGE: u8 = 64;
const DATA: u8 = 65;
const NO_INPUT: u8 = 66;
const BUDGET: u8 = 75;
const VERIFY_FAILED: u8 = 2;
const TYPE_ERROR: u8 = 1;

#[derive(Parser)]
#[command(name = "routenet", version, about = "Differential proof nets, routing areas and a compiler for a concurrent λ-calculus")]
struct Cli {
    /// Step or state budget for normalization and evaluation.
    #[arg(long, global = true, env = "ROUTENET_BUDGET", default_value_t = 10_000)]
    budget: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Type and effect of a program under a reference context.
    Check { ctx: PathBuf, program: PathBuf },
    /// Closed net of a program; references missing from the context are inferred.
    Compile {
        program: PathBuf,
        #[arg(long)]
        ctx: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Normal form of a net or sum given as JSON.
    Reduce {
        net: PathBuf,
        /// Also reduce inside boxes with every deterministic rule.
        #[arg(long)]
        deep: bool,
    },
    /// Value multisets of the terminated runs of a program, one per line.
    Values { program: PathBuf },
    /// Net of the routing area of a matrix file.
    Area {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Json)]
        emit: Emit,
    },
    /// Runs a seeded verification suite.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, e: impl Display) -> Failure {
    Failure { code, message: e.to_string() }
}

fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| fail(NO_INPUT, format!("{}: {e}", p.display())))
}

fn type_failure(e: TypeError) -> Failure {
    fail(TYPE_ERROR, e)
}

fn rewrite_failure(e: RewriteError) -> Failure {
    match e {
        RewriteError::BudgetExhausted { .. } => fail(BUDGET, e),
        e => fail(DATA, e),
    }
}

fn eval_failure(e: EvalError) -> Failure {
    fail(BUDGET, e)
}

fn translate_failure(e: TranslateError) -> Failure {
    match e {
        TranslateError::Eval(e) => eval_failure(e),
        e => fail(TYPE_ERROR, e),
    }
}

fn ctx(p: Option<&Path>) -> Result<RegionCtx, Failure> {
    match p {
        Some(p) => parse_region_ctx(&read(p)?).map_err(|e| fail(DATA, format!("{}: {e}", p.display()))),
        None => Ok(RegionCtx::new()),
    }
}

fn program(p: &Path) -> Result<routenet::lang::TermA, Failure> {
    parse_program(&read(p)?).map_err(|e| fail(DATA, format!("{}: {e}", p.display())))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let budget = cli.budget;
    match cli.command {
        Command::Check { ctx: c, program: p } => {
            let r = ctx(Some(&c))?;
            let m = program(&p)?;
            let t = typecheck_amadio(&r, &Vec::new(), &m).map_err(type_failure)?;
            let e: Vec<&str> = t.eff.iter().map(String::as_str).collect();
            Ok(format!("{} ! {{{}}}\n", t.ty, e.join(",")))
        }
        Command::Compile { program: p, ctx: c, emit } => {
            let r = ctx(c.as_deref())?;
            let m = program(&p)?;
            let n = compile(&r, &m).map_err(translate_failure)?;
            Ok(match emit {
                Emit::Json => serialize_net(&n),
                Emit::Dot => to_dot(&n),
            })
        }
        Command::Reduce { net, deep } => {
            let s = parse(&read(&net)?).map_err(|e| fail(DATA, format!("{}: {e}", net.display())))?;
            let nf = if deep { deep_normalize(&s, budget) } else { normalize(&s, budget) };
            Ok(serialize(&nf.map_err(rewrite_failure)?))
        }
        Command::Values { program: p } => {
            let m = program(&p)?;
            typecheck_amadio(&routenet::lang::infer_regions(&RegionCtx::new(), &m).map_err(type_failure)?, &Vec::new(), &m)
                .map_err(type_failure)?;
            let mut lines: Vec<String> = values(&m, budget).map_err(eval_failure)?.iter().map(|o| o.to_string()).collect();
            lines.sort();
            Ok(lines.iter().map(|l| format!("{l}\n")).collect())
        }
        Command::Area { matrix, emit } => {
            let rel: Multirelation =
                read(&matrix)?.parse().map_err(|e| fail(DATA, format!("{}: {e}", matrix.display())))?;
            let n = build_area(&RoutingArea::new(rel));
            Ok(match emit {
                Emit::Json => serialize_net(&n),
                Emit::Dot => to_dot(&n),
            })
        }
        Command::Verify { suite, seed, cases } => {
            let report = run_suite(&suite, seed, cases, budget).map_err(|e| fail(USAGE, e))?;
            if report.ok() {
                Ok(report.to_string())
            } else {
                Err(fail(VERIFY_FAILED, report.to_string().trim_end()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            if !out.is_empty() && !out.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("routenet: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
