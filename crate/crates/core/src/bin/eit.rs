fn main() {
    std::process::exit(eit::cli::main_with_args(std::env::args_os()));
}
