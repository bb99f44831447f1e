use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use opsq_cli::{emit, parse_dims, run, Command, Overrides, SEED_ENV};
use opsq_core::falsify::Direction;

/// Classify scalar functions, verify Jensen-type operator inequalities and
/// search for counterexamples. Reports are JSON; exit status is 0 when
/// everything holds as claimed, 1 on a refutation or regression, 2 on a
/// usage error.
#[derive(Parser, Debug)]
#[command(name = "opsq", version)]
struct Cli {
    #[arg(value_enum)]
    command: Option<Command>,
    #[command(flatten)]
    flags: Flags,
}

// An alias, so clap parses the whole list as one value instead of repeating the flag.
type DimList = Vec<usize>;

#[derive(Args, Debug)]
struct Flags {
    /// Built-in function: square, cube, recip, tlogt, power:<r>, affine:<a>:<b>, neg:<id>.
    #[arg(long)]
    function: Option<String>,
    /// Inequality id, e.g. two-point, map, convex:isometry.
    #[arg(long)]
    inequality: Option<String>,
    /// Matrix sizes: `1-6`, `2,4,8` or a mix.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<DimList>,
    #[arg(long)]
    trials: Option<usize>,
    /// Overridden by OPSQ_SEED when that is set.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_parser = parse_direction)]
    direction: Option<Direction>,
    /// JSON document with any of the fields above (snake_case names as in the
    /// report's `config`); flags win over it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    match s {
        "superquadratic" => Ok(Direction::Superquadratic),
        "subquadratic" => Ok(Direction::Subquadratic),
        _ => Err(format!("`{s}` is neither superquadratic nor subquadratic")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let f = cli.flags;
    let flags = Overrides {
        command: cli.command,
        function_id: f.function,
        inequality_id: f.inequality,
        dims: f.dims,
        trials: f.trials,
        seed: f.seed,
        tolerance: f.tol,
        output_path: f.out,
        threads: f.threads,
        restarts: f.restarts,
        steps: f.steps,
        direction: f.direction,
    };
    let seed_env = std::env::var(SEED_ENV).ok();
    let result = (|| {
        let base = match &f.config {
            Some(p) => Overrides::load(p)?,
            None => Overrides::default(),
        };
        let cfg = flags.over(base).resolve(seed_env.as_deref())?;
        let report = run(&cfg)?;
        emit(&report)?;
        Ok::<_, opsq_cli::CliError>(report.exit_code())
    })();
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("opsq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
