use std::io::Write;

fn main() {
    let outcome = sdlab::cli::run(std::env::args().skip(1));
    print!("{}", outcome.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", outcome.stderr);
    std::process::exit(outcome.status);
}
