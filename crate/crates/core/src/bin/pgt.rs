use std::process::ExitCode;

fn main() -> ExitCode {
    pseudo_gt::cli::main_from(std::env::args_os())
}
