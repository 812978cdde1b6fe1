fn main() {
    std::process::exit(wscov_cli::main_with_args(std::env::args_os()));
}
