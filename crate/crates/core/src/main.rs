use std::process::ExitCode;

use clap::Parser;

use areaflow::cli_io::{self, Cli, Command};
use areaflow::FlowError;

fn report_error(e: &FlowError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        FlowError::Config { .. } => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let outcome = cli_io::parse_config(&args).and_then(|cfg| {
                let out = cli_io::execute(&cfg)?;
                println!("output: {}", cfg.output_dir.display());
                Ok(out)
            });
            match outcome {
                Ok(o) => {
                    for c in &o.verdict.claims {
                        let status = match (c.skipped, c.holds) {
                            (true, _) => "SKIP",
                            (false, true) => "PASS",
                            (false, false) => "FAIL",
                        };
                        println!("{status} {:<26} margin {:+.3e} at t = {:.4}", c.id, c.worst_margin, c.worst_time);
                    }
                    if let Some(e) = &o.verdict.run_error {
                        println!("run stopped: {e}");
                    }
                    for w in &o.verdict.warnings {
                        println!("warning: {w}");
                    }
                    ExitCode::from(o.exit_code as u8)
                }
                Err(e) => report_error(&e),
            }
        }
        Command::Sweep(args) => match cli_io::sweep(&args) {
            Ok(entries) => {
                for e in &entries {
                    println!(
                        "{} n = {} amplitude = {} -> {}",
                        if e.passed { "PASS" } else { "FAIL" },
                        e.n,
                        e.amplitude,
                        e.dir.display()
                    );
                }
                ExitCode::from(if entries.iter().all(|e| e.passed) { 0 } else { 1 })
            }
            Err(e) => report_error(&e),
        },
        Command::Verify(args) => match cli_io::verify(&args) {
            Ok(report) => {
                println!("{}", report.to_json_string());
                ExitCode::from(if report.passed { 0 } else { 1 })
            }
            Err(e) => report_error(&e),
        },
    }
}
