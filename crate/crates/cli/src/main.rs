use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = posdef_cli::run(std::env::args_os());
    for line in &outcome.stderr {
        eprintln!("{line}");
    }
    if !outcome.stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        if out.write_all(&outcome.stdout).and_then(|()| out.flush()).is_err() {
            return ExitCode::from(posdef_cli::error::EXIT_NUMERICAL as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
