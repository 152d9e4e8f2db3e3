use std::io;

use gibbs_qaoa::harness::cli::run_cli;

fn main() {
    let code = run_cli(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
