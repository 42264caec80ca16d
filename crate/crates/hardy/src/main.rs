fn main() {
    std::process::exit(hardy::cli::main_with_args(std::env::args_os()));
}
