use std::process::ExitCode;

use breakdiv_cli::{run, CommandRequest, OutputFormat, Subcommand};
use breakdiv_core::homology::ConductanceMode;
use clap::Parser;

/// Canonical representatives for divisor classes on weighted graphs, and
/// exact Matrix-Tree verification.
#[derive(Parser)]
#[command(name = "breakdiv", version, about)]
struct Cli {
    /// One of: canonical, reduce, q-orient, orient, is-break,
    /// enumerate-break, trees, volumes, verify, equiv, jacobian-svg
    subcommand: String,

    /// Graph JSON file
    #[arg(long)]
    graph: String,

    /// Divisor: a JSON file path or inline JSON
    #[arg(long)]
    divisor: Option<String>,

    /// Second divisor for `equiv`
    #[arg(long)]
    divisor2: Option<String>,

    /// Base vertex; defaults to the first vertex of the graph
    #[arg(long)]
    q: Option<String>,

    /// Treat divisors as metric divisors (points may sit inside edges)
    #[arg(long)]
    metric: bool,

    /// Output format: json or text
    #[arg(long, default_value = "json")]
    format: String,

    /// Seed for the sampled checks in `verify`
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Conductance convention for coweights: length or inverse
    #[arg(long, default_value = "length")]
    conductance: String,

    /// Output file for `jacobian-svg`
    #[arg(long)]
    out: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let subcommand = match Subcommand::parse(&cli.subcommand) {
        Some(s) => s,
        None => {
            eprintln!("unknown subcommand: {}", cli.subcommand);
            return ExitCode::from(2);
        }
    };
    let format = match cli.format.as_str() {
        "json" => OutputFormat::Json,
        "text" => OutputFormat::Text,
        other => {
            eprintln!("unknown format: {}", other);
            return ExitCode::from(2);
        }
    };
    let conductance = match cli.conductance.as_str() {
        "length" => ConductanceMode::Length,
        "inverse" => ConductanceMode::InverseLength,
        other => {
            eprintln!("unknown conductance mode: {}", other);
            return ExitCode::from(2);
        }
    };

    let request = CommandRequest {
        subcommand,
        graph: cli.graph,
        divisor: cli.divisor,
        divisor2: cli.divisor2,
        q: cli.q,
        metric: cli.metric,
        format,
        seed: cli.seed,
        conductance,
        out: cli.out,
    };

    match run(&request) {
        Ok(outcome) => {
            println!("{}", outcome.render(format));
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}
