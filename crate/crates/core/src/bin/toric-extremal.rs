use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = toric_extremal::cli::run_cli(std::env::args_os());
    // A closed pipe is not worth a panic.
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    ExitCode::from(out.exit as u8)
}
