use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    kinetic_lift::cli::run_from_args(std::env::args_os())
}
