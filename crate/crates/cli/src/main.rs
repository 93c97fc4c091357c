fn main() {
    std::process::exit(gradperc_cli::run_cli(std::env::args_os()));
}
