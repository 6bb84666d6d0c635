use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bimodal_sat::formula::{parse, Formula};
use bimodal_sat::models::{check_frame, model_check, model_from_tableau, Model};
use bimodal_sat::oracle::{exhaustive_search_in, MAX_ORACLE_SETS};
use bimodal_sat::solver::{solve_in, SearchOptions, SolveError, DEFAULT_STEP_LIMIT};
use bimodal_sat::tableau::{Logic, TableauError, TableauUniverse};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

const SAT: u8 = 0;
const UNSAT: u8 = 1;
const INPUT_ERROR: u8 = 2;
const RESOURCE_LIMIT: u8 = 3;
const INTERNAL_ERROR: u8 = 4;

#[derive(Parser)]
#[command(
    name = "bimodal-sat",
    version,
    about = "Satisfiability for K4xS5, S4xS5 and SSL"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of one formula.
    Solve(SolveArgs),
    /// Count tableau-sets and compare with the exponential bound.
    Count(CountArgs),
    /// Check a model file against the frame conditions of a logic.
    Validate(ValidateArgs),
    /// Solve every formula in a suite file and print CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Formula text, e.g. "([]x0 & ~x0)".
    #[arg(long)]
    formula: Option<String>,
    /// File holding one formula; blank lines and `#` comments are skipped.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    logic: Logic,
    #[command(flatten)]
    input: Input,
    /// Write the countermodel of a satisfiable formula as JSON.
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Print search statistics as JSON.
    #[arg(long)]
    stats: bool,
    /// Cross-check the verdict with the exhaustive search when small enough.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    memoize: bool,
    #[arg(long, env = "BIMODAL_SAT_STEP_LIMIT", default_value_t = DEFAULT_STEP_LIMIT)]
    limit_steps: u64,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    logic: Logic,
    #[arg(long)]
    formula: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    logic: Logic,
    #[arg(long)]
    model: PathBuf,
    /// Formula to evaluate at the designated world (or `--world`).
    #[arg(long)]
    formula: Option<String>,
    #[arg(long, requires = "formula")]
    world: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    logic: Logic,
    #[arg(long)]
    suite: PathBuf,
    #[arg(long)]
    memoize: bool,
    #[arg(long, env = "BIMODAL_SAT_STEP_LIMIT", default_value_t = DEFAULT_STEP_LIMIT)]
    limit_steps: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Count(args) => cmd_count(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    ExitCode::from(code)
}

fn fail(code: u8, message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    code
}

/// Non-empty lines of a formula file with `#` comments removed.
fn formula_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn read_formula(input: &Input) -> Result<Formula, String> {
    let text = match (&input.formula, &input.file) {
        (Some(text), _) => text.clone(),
        (None, Some(path)) => {
            let content = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let lines: Vec<_> = formula_lines(&content).collect();
            match lines.as_slice() {
                [(_, line)] => line.to_string(),
                [] => return Err(format!("{} holds no formula", path.display())),
                _ => {
                    return Err(format!(
                        "{} holds {} formulas; use bench for suites",
                        path.display(),
                        lines.len()
                    ))
                }
            }
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    parse(&text).map_err(|e| format!("parse error: {e}"))
}

fn universe_error(e: TableauError) -> u8 {
    fail(RESOURCE_LIMIT, e)
}

fn solve_error(e: SolveError) -> u8 {
    match e {
        SolveError::Invariant(_) => fail(INTERNAL_ERROR, e),
        SolveError::Tableau(_) | SolveError::ResourceLimit(_) => fail(RESOURCE_LIMIT, e),
    }
}

fn cmd_solve(args: &SolveArgs) -> u8 {
    let formula = match read_formula(&args.input) {
        Ok(f) => f,
        Err(e) => return fail(INPUT_ERROR, e),
    };
    let universe = match TableauUniverse::new(&formula, args.logic) {
        Ok(u) => u,
        Err(e) => return universe_error(e),
    };
    let mut opts = SearchOptions::new(args.logic);
    opts.collect_tableau = args.model_out.is_some();
    opts.memoize = args.memoize;
    opts.step_limit = args.limit_steps;

    let start = Instant::now();
    let verdict = match solve_in(&universe, &opts) {
        Ok(v) => v,
        Err(e) => return solve_error(e),
    };
    let elapsed = start.elapsed();

    if args.oracle {
        if universe.len() <= MAX_ORACLE_SETS {
            match exhaustive_search_in(&universe) {
                Ok(expected) if expected != verdict.satisfiable => {
                    return fail(
                        INTERNAL_ERROR,
                        format!(
                            "oracle disagreement: solver says {}, oracle says {expected}",
                            verdict.satisfiable
                        ),
                    );
                }
                Ok(_) => {}
                Err(e) => eprintln!("note: oracle skipped: {e}"),
            }
        } else {
            eprintln!(
                "note: oracle skipped: {} tableau-sets (max {MAX_ORACLE_SETS})",
                universe.len()
            );
        }
    }

    println!("{}", if verdict.satisfiable { "SAT" } else { "UNSAT" });

    if args.stats {
        let lengths = formula.lengths();
        let record = json!({
            "logic": args.logic,
            "satisfiable": verdict.satisfiable,
            "n": lengths.n,
            "ell": lengths.ell,
            "subformulas": universe.table().len(),
            "tableau_sets": universe.len(),
            "depth_bound": verdict.depth_bound().to_string(),
            "stats": verdict.stats,
            "wall_ms": elapsed.as_secs_f64() * 1000.0,
        });
        println!("{record}");
    }

    if let Some(path) = &args.model_out {
        match &verdict.witness {
            Some(t) => {
                let model = match model_from_tableau(&universe, t) {
                    Ok(m) => m,
                    Err(e) => return fail(INTERNAL_ERROR, format!("witness rejected: {e}")),
                };
                if let Err(e) = fs::write(path, model.to_json_string() + "\n") {
                    return fail(INPUT_ERROR, format!("cannot write {}: {e}", path.display()));
                }
            }
            None => eprintln!("note: no model written for an unsatisfiable formula"),
        }
    }

    if verdict.satisfiable {
        SAT
    } else {
        UNSAT
    }
}

fn cmd_count(args: &CountArgs) -> u8 {
    let formula = match parse(&args.formula) {
        Ok(f) => f,
        Err(e) => return fail(INPUT_ERROR, format!("parse error: {e}")),
    };
    let table = formula.subformulas();
    let lengths = formula.lengths();
    let count = match bimodal_sat::tableau::count_tableau_sets(&table, args.logic) {
        Ok(c) => c,
        Err(e) => return universe_error(e),
    };
    println!("formula  {formula}");
    println!("logic    {}", args.logic.short_name());
    println!("n        {}", lengths.n);
    println!("ell      {}", lengths.ell);
    println!("a        {}", table.len());
    println!("A        {count}");
    if lengths.ell >= 3 {
        let bound = 2f64.powf(2.0 * lengths.ell as f64 / 3.0);
        let status = match args.logic {
            Logic::K4xS5 => "n/a (K4xS5)",
            _ if (count as f64) < bound => "PASS",
            _ => "FAIL",
        };
        println!("bound    2^(2*{}/3) = {bound:.2}  {status}", lengths.ell);
    } else {
        println!("bound    n/a (ell < 3)");
    }
    0
}

fn load_model(path: &Path) -> Result<Model, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Model::from_json_str(&text).map_err(|e| e.to_string())
}

fn cmd_validate(args: &ValidateArgs) -> u8 {
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(e) => return fail(INPUT_ERROR, e),
    };
    let formula = match args.formula.as_deref().map(parse).transpose() {
        Ok(f) => f,
        Err(e) => return fail(INPUT_ERROR, format!("parse error: {e}")),
    };
    let report = check_frame(&model, args.logic);
    print!("{report}");
    println!("frame    {}", if report.passed() { "PASS" } else { "FAIL" });
    let mut ok = report.passed();
    if let Some(f) = formula {
        let Some(world) = args.world.or(model.designated) else {
            return fail(INPUT_ERROR, "model has no designated world; pass --world");
        };
        match model_check(&model, world, &f) {
            Ok(truth) => {
                println!(
                    "formula  {} at world {world}",
                    if truth { "TRUE" } else { "FALSE" }
                );
                ok &= truth;
            }
            Err(e) => return fail(INPUT_ERROR, e),
        }
    }
    if ok {
        0
    } else {
        1
    }
}

fn cmd_bench(args: &BenchArgs) -> u8 {
    let text = match fs::read_to_string(&args.suite) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                INPUT_ERROR,
                format!("cannot read {}: {e}", args.suite.display()),
            )
        }
    };
    let mut out = io::stdout().lock();
    let mut emit = |row: String| writeln!(out, "{row}").is_ok();
    if !emit("line,formula,verdict,tableau_sets,max_depth,depth_bound,steps,wall_ms".into()) {
        return INPUT_ERROR;
    }
    for (line, source) in formula_lines(&text) {
        let quoted = format!("\"{}\"", source.replace('"', "\"\""));
        let row = match parse(source) {
            Err(_) => format!("{line},{quoted},ERROR,,,,,"),
            Ok(formula) => bench_row(args, &formula, line, &quoted),
        };
        if !emit(row) {
            return INPUT_ERROR;
        }
    }
    0
}

fn bench_row(args: &BenchArgs, formula: &Formula, line: usize, quoted: &str) -> String {
    let mut opts = SearchOptions::new(args.logic);
    opts.memoize = args.memoize;
    opts.step_limit = args.limit_steps;
    let start = Instant::now();
    let universe = match TableauUniverse::new(formula, args.logic) {
        Ok(u) => u,
        Err(_) => return format!("{line},{quoted},LIMIT,,,,,"),
    };
    let a = universe.len();
    match solve_in(&universe, &opts) {
        Ok(v) => format!(
            "{line},{quoted},{},{a},{},{},{},{:.3}",
            if v.satisfiable { "SAT" } else { "UNSAT" },
            v.stats.max_recursion_depth,
            v.depth_bound(),
            v.stats.steps,
            start.elapsed().as_secs_f64() * 1000.0
        ),
        Err(SolveError::Invariant(_)) => format!("{line},{quoted},INVARIANT,{a},,,,"),
        Err(_) => format!("{line},{quoted},LIMIT,{a},,,,"),
    }
}
