fn main() {
    std::process::exit(pdce_cli::run(std::env::args_os()));
}
