use clap::error::ErrorKind;
use clap::Parser;

use domainwall_cli::{run, Cli};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successful outcomes; anything
            // else is a usage error.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            err.print().expect("stderr is writable");
            std::process::exit(code);
        }
    };
    std::process::exit(run::execute(cli));
}
