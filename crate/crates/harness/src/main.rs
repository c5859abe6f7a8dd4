fn main() {
    std::process::exit(affiq::cli::run_cli(std::env::args_os()));
}
