fn main() {
    std::process::exit(apulse_cli::cli::run(std::env::args_os()));
}
