fn main() {
    std::process::exit(robust_mab::cli::main_with_args(std::env::args_os()));
}
