fn main() {
    std::process::exit(gaussrt::cli::main_with_args(std::env::args_os()));
}
