use std::process::ExitCode;

use clap::Parser;
use timebin_qwalk::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((dir, outputs)) => {
            print!("{}", outputs.report);
            let n = outputs.files.len();
            println!(
                "wrote {n} file{} to {}",
                if n == 1 { "" } else { "s" },
                dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
