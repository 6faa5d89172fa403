use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use possnet::compile::{compile_with_report, parents_at_stage, prepare, stage_bases, Ordering};
use possnet::io::{export_dot, parse_base, parse_formula, parse_literals, parse_network, serialize_base, serialize_network};
use possnet::marginalize::marginal_base;
use possnet::oracle::{random_base, verify_compilation};
use possnet::semantics::{inconsistency_degree, necessity, possibility};
use possnet::{Error, Formula, FormulaBase, Interpretation, ParseError, Var, Weight};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

const GEN_POOL: [&str; 7] = ["1/5", "1/3", "2/5", "1/2", "2/3", "7/10", "1"];

/// Compile weighted possibilistic bases into possibilistic networks and check
/// them against brute-force semantics.
#[derive(Parser)]
#[command(name = "possnet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a base into a network along an elimination ordering.
    Compile {
        base: PathBuf,
        /// Comma-separated ordering of all variables (default: declaration order).
        #[arg(long)]
        order: Option<String>,
        /// Where to write the network JSON.
        #[arg(long)]
        out: PathBuf,
        /// Also write a Graphviz rendering of the graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Possibility, necessity or conditional possibility of a formula.
    Query {
        base: PathBuf,
        #[arg(value_enum)]
        mode: Mode,
        formula: String,
        /// Conditioning formula (required for `cond`).
        #[arg(long)]
        context: Option<String>,
        /// Append a 6-digit decimal approximation.
        #[arg(long)]
        decimal: bool,
    },
    /// Possibility degree of one complete world, e.g. `se,!wi,su`.
    Eval {
        base: PathBuf,
        world: String,
        #[arg(long)]
        decimal: bool,
    },
    /// Forget a variable and print the resulting base.
    Marginalize { base: PathBuf, var: String },
    /// Parent set of a variable at its compilation stage.
    Parents {
        base: PathBuf,
        var: String,
        #[arg(long)]
        order: Option<String>,
    },
    /// Compare a network's joint distribution with a base, world by world.
    Verify { base: PathBuf, network: PathBuf },
    /// Write a random consistent base.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        /// Output file (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Pi,
    Nec,
    Cond,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(Error::Inconsistent(_)) = cause.downcast_ref::<Error>() {
            return EXIT_INCONSISTENT;
        }
    }
    EXIT_USAGE
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Compile { base, order, out, dot } => cmd_compile(&base, order.as_deref(), &out, dot.as_deref()),
        Command::Query { base, mode, formula, context, decimal } => {
            cmd_query(&base, mode, &formula, context.as_deref(), decimal)
        }
        Command::Eval { base, world, decimal } => cmd_eval(&base, &world, decimal),
        Command::Marginalize { base, var } => cmd_marginalize(&base, &var),
        Command::Parents { base, var, order } => cmd_parents(&base, &var, order.as_deref()),
        Command::Verify { base, network } => cmd_verify(&base, &network),
        Command::Gen { seed, vars, clauses, out } => cmd_gen(seed, vars, clauses, out.as_deref()),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_base(path: &Path) -> anyhow::Result<FormulaBase> {
    let text = read(path)?;
    parse_base(&text).map_err(|e| anyhow!(Error::from(e)).context(path.display().to_string()))
}

fn ordering(b: &FormulaBase, flag: Option<&str>) -> anyhow::Result<Ordering> {
    let Some(text) = flag else {
        return Ok(Ordering::declared(b));
    };
    let seq = text
        .split(',')
        .map(|s| Var::new(s.trim()))
        .collect::<Result<Vec<_>, _>>()
        .context("--order")?;
    Ordering::new(seq, b.vars()).context("--order")
}

fn formula(text: &str, what: &str) -> anyhow::Result<Formula> {
    parse_formula(text).map_err(|e: ParseError| anyhow!(Error::from(e)).context(what.to_string()))
}

fn known_var(b: &FormulaBase, name: &str) -> anyhow::Result<Var> {
    let v = Var::new(name)?;
    if !b.vars().contains(&v) {
        bail!(Error::UnknownVar(v));
    }
    Ok(v)
}

fn show(w: &Weight, decimal: bool) -> String {
    if decimal {
        format!("{w} ({:.6})", w.to_f64())
    } else {
        w.to_string()
    }
}

fn names(vars: &[Var]) -> String {
    vars.iter().map(Var::name).collect::<Vec<_>>().join(" ")
}

fn cmd_compile(base: &Path, order: Option<&str>, out: &Path, dot: Option<&Path>) -> anyhow::Result<ExitCode> {
    let b = load_base(base)?;
    let o = ordering(&b, order)?;
    let compiled = compile_with_report(&b, &o)?;
    for s in &compiled.stages {
        eprintln!(
            "{}: base {} entries, immediate parents [{}], parents [{}], {} table cells, marginal {} entries",
            s.var,
            s.base_size,
            names(&s.immediate),
            names(&s.parents),
            s.cpt_cells,
            s.marginal_size
        );
    }
    write(out, &serialize_network(&compiled.network))?;
    if let Some(path) = dot {
        write(path, &export_dot(&compiled.network))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_query(base: &Path, mode: Mode, f: &str, context: Option<&str>, decimal: bool) -> anyhow::Result<ExitCode> {
    let b = possnet::normalize::to_clausal(&load_base(base)?);
    let f = formula(f, "formula")?;
    let ctx = context.map(|c| formula(c, "--context")).transpose()?;
    let value = match (mode, ctx) {
        (Mode::Pi, None) => possibility(&b, &f)?,
        (Mode::Nec, None) => necessity(&b, &f)?,
        (Mode::Cond, Some(c)) => {
            let h = possibility(&b, &c)?;
            if h.is_zero() {
                Weight::one()
            } else {
                let joint = possibility(&b, &Formula::And(vec![f, c]))?;
                joint.checked_div(&h).expect("Π(f ∧ c) <= Π(c)")
            }
        }
        (Mode::Cond, None) => bail!("`cond` needs --context"),
        (_, Some(_)) => bail!("--context only applies to `cond`"),
    };
    println!("{}", show(&value, decimal));
    Ok(ExitCode::SUCCESS)
}

fn cmd_eval(base: &Path, world: &str, decimal: bool) -> anyhow::Result<ExitCode> {
    let b = load_base(base)?;
    let lits = if world.trim().is_empty() {
        Vec::new()
    } else {
        parse_literals(world).map_err(Error::from).context("world")?
    };
    let w = Interpretation::from_literals(b.vars().to_vec().into(), &lits).context("world")?;
    let mut worst = Weight::zero();
    for (f, weight) in b.entries() {
        if !f.eval(&w)? && *weight > worst {
            worst = weight.clone();
        }
    }
    println!("{}", show(&worst.complement(), decimal));
    Ok(ExitCode::SUCCESS)
}

fn cmd_marginalize(base: &Path, var: &str) -> anyhow::Result<ExitCode> {
    let b = load_base(base)?;
    let v = known_var(&b, var)?;
    let clausal = prepare(&b)?;
    print!("{}", serialize_base(&marginal_base(&clausal, &v)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_parents(base: &Path, var: &str, order: Option<&str>) -> anyhow::Result<ExitCode> {
    let b = load_base(base)?;
    let v = known_var(&b, var)?;
    let o = ordering(&b, order)?;
    let stages = stage_bases(&b, &o)?;
    let pos = o.position(&v).expect("ordering covers the universe");
    println!("{}", names(&parents_at_stage(&stages[pos], &v, &o).parents));
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(base: &Path, network: &Path) -> anyhow::Result<ExitCode> {
    let b = load_base(base)?;
    let parsed = parse_network(&read(network)?).with_context(|| network.display().to_string())?;
    for v in &parsed.warnings.violations {
        eprintln!("warning: {v}");
    }
    let report = verify_compilation(&b, &parsed.network)?;
    if report.passed() {
        println!("ok");
        return Ok(ExitCode::SUCCESS);
    }
    for m in report.mismatches.iter().take(10) {
        println!("{m}");
    }
    eprintln!("{} mismatches", report.mismatches.len());
    Ok(ExitCode::from(EXIT_MISMATCH))
}

fn cmd_gen(seed: u64, vars: usize, clauses: usize, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let pool: Vec<Weight> = GEN_POOL.iter().map(|s| s.parse().expect("valid weight")).collect();
    let b = random_base(seed, vars, clauses, &pool)?;
    debug_assert!(inconsistency_degree(&b).is_zero());
    let text = serialize_base(&b);
    match out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
