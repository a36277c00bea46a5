use clap::error::ErrorKind;
use clap::Parser;

use lenspec::cli::{self, Cli, Command};

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
            _ => 1,
        };
        let _ = e.print();
        std::process::exit(code);
    });
    let code = match &cli.command {
        Command::Search(args) => cli::cmd_search(args),
        Command::Compare(args) => cli::cmd_compare(args),
        Command::Selftest(args) => cli::cmd_selftest(args),
    };
    std::process::exit(code);
}
