fn main() {
    std::process::exit(minproc::cli::main_with_args(std::env::args_os()));
}
