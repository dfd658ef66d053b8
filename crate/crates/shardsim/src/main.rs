use std::process::ExitCode;

fn main() -> ExitCode {
    shardsim::cli::main()
}
