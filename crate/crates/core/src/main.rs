use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = ro_stability::harness::cli::run(std::env::args_os());
    print!("{out}");
    ExitCode::from(code as u8)
}
