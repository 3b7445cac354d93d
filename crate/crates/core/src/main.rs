use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use affine_halfline::cli::{execute, Cli};
use affine_halfline::output::write_table;
use affine_halfline::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = cli.command.run_config().clone();
    let out = match execute(&cli.command) {
        Ok(out) => out,
        Err(
            e @ (Error::InvalidParameter(_) | Error::Domain { .. } | Error::InadmissibleBranch(_)),
        ) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let written = match &run.out {
        Some(path) => File::create(path).map_err(Error::from).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_table(&mut w, run.output, &out.header, &out.table)?;
            w.flush().map_err(Error::from)
        }),
        None => {
            let mut w = io::stdout().lock();
            write_table(&mut w, run.output, &out.header, &out.table)
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }

    for line in &out.summary {
        eprintln!("{line}");
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        for f in &out.failures {
            eprintln!("FAILED: {f}");
        }
        ExitCode::from(1)
    }
}
