use clap::Parser;
use episodes_cli::args::Cli;
use episodes_cli::commands;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests land here too; only real usage
            // errors exit nonzero.
            let code = if err.use_stderr() { 1 } else { 0 };
            err.print().expect("writing to stdio");
            std::process::exit(code);
        }
    };
    if let Err(err) = commands::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
