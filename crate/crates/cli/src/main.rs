fn main() {
    std::process::exit(cbt_cli::run_cli(std::env::args_os()));
}
