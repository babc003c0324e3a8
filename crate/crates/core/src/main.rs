fn main() -> std::process::ExitCode {
    fairrel::cli::run(std::env::args_os())
}
