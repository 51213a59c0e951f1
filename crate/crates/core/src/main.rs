use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::json;

use superfrob::io::{run_source, Overrides, Task};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaskArg {
    Bracket,
    Rank,
    Involutive,
    Straighten,
    Frobenius,
    Verify,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Bracket => Task::Bracket,
            TaskArg::Rank => Task::Rank,
            TaskArg::Involutive => Task::Involutive,
            TaskArg::Straighten => Task::Straighten,
            TaskArg::Frobenius => Task::Frobenius,
            TaskArg::Verify => Task::Verify,
        }
    }
}

/// Adapted coordinates for involutive distributions on graded formal charts.
///
/// Reads a JSON problem file and prints a JSON report. Exit status: 0 on
/// success, 1 for a negative answer or failed precondition, 2 for malformed
/// input.
#[derive(Debug, Parser)]
#[command(name = "superfrob", version)]
struct Cli {
    /// Problem file; `-` or omitted reads standard input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Replaces the task named in the problem file.
    #[arg(long, value_enum)]
    task: Option<TaskArg>,
    /// Overrides the J-degree truncation order.
    #[arg(long)]
    j_order: Option<u32>,
    /// Overrides the base-degree truncation order.
    #[arg(long)]
    base_order: Option<u32>,
    /// Re-checks a certificate written by the frobenius task.
    #[arg(long, value_name = "CERT")]
    verify: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, base_dir) = match read_input(cli.input.as_ref()) {
        Ok(pair) => pair,
        Err(e) => {
            println!("{}", json!({ "error_kind": "IoError", "message": e.to_string() }));
            return ExitCode::from(2);
        }
    };
    let overrides = Overrides {
        task: cli.task.map(Task::from),
        j_order: cli.j_order,
        base_order: cli.base_order,
        certificate: cli.verify,
    };
    let outcome = run_source(&text, &overrides, base_dir.as_deref());
    println!(
        "{}",
        serde_json::to_string_pretty(&outcome.report).expect("report serializes")
    );
    ExitCode::from(outcome.exit_code as u8)
}

fn read_input(path: Option<&PathBuf>) -> io::Result<(String, Option<PathBuf>)> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let text = fs::read_to_string(p)?;
            Ok((text, p.parent().map(PathBuf::from)))
        }
        _ => {
            let mut text = String::new();
            io::stdin().read_to_string(&mut text)?;
            Ok((text, None))
        }
    }
}
