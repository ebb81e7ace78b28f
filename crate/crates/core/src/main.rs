use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(varstab::cli::run(std::env::args_os()) as u8)
}
