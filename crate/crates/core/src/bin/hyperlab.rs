fn main() {
    std::process::exit(hyperlab::cli::main_with_args(std::env::args_os()));
}
