use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Err(e) = qbracket::cli::init_threads() {
        eprintln!("{e}");
        return ExitCode::from(2);
    }
    let out = qbracket::cli::run(std::env::args_os());
    // A closed pipe on stdout is not an error worth reporting.
    let _ = writeln!(std::io::stdout(), "{}", out.stdout);
    ExitCode::from(out.code as u8)
}
