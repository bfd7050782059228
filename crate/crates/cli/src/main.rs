use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(stabfar_cli::dispatch(std::env::args()) as u8)
}
