use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use num::BigRational;
use ratdyn_cli::{run, Command, Format, Options, EXIT_INPUT};

/// Limits, potential good reduction and hybrid convergence for families of
/// rational maps.
#[derive(Parser, Debug)]
#[command(name = "ratdyn", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Family file; `-` reads standard input.
    file: PathBuf,
    #[arg(long, value_enum, env = "RATDYN_FORMAT", default_value = "json")]
    format: Format,
    /// Relative precision, in units of `t`, for expansions and resultants.
    #[arg(long, env = "RATDYN_PRECISION")]
    precision: Option<i64>,
    /// Largest exponent denominator tried by the search.
    #[arg(long, env = "RATDYN_MAX_RAMIFICATION")]
    max_ramification: Option<u32>,
    /// Search range `|s| ≤ depth` for disk radii `|t|^{2s}`.
    #[arg(long, env = "RATDYN_SEARCH_DEPTH")]
    search_depth: Option<i64>,
    #[arg(long, env = "RATDYN_MAX_PROBES")]
    max_probes: Option<usize>,
    /// Sampling base in (0, 1), e.g. `1/2`.
    #[arg(long, env = "RATDYN_T0")]
    t0: Option<BigRational>,
    #[arg(long, env = "RATDYN_SAMPLES")]
    samples: Option<u32>,
    #[arg(long, env = "RATDYN_ITERATE_POWER")]
    iterate_power: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = if cli.file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map(|_| s)
    } else {
        std::fs::read_to_string(&cli.file)
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            eprintln!("ratdyn: cannot read {}: {e}", cli.file.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let opts = Options {
        format: cli.format,
        precision: cli.precision,
        max_ramification: cli.max_ramification,
        search_depth: cli.search_depth,
        max_probes: cli.max_probes,
        t0: cli.t0,
        samples: cli.samples,
        iterate_power: cli.iterate_power,
    };
    let (out, code) = run(cli.command, &text, &opts);
    print!("{out}");
    ExitCode::from(code as u8)
}
