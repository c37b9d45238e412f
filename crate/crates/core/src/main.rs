use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = tan::cli::run(std::env::args_os());
    let out = result.output();
    if result.exit_code == tan::cli::EXIT_INPUT && result.json_payload.is_none() {
        let _ = std::io::stderr().write_all(out.as_bytes());
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    ExitCode::from(result.exit_code as u8)
}
