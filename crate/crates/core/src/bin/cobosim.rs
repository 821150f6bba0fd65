fn main() {
    std::process::exit(cobosim::cli::main_with_args(std::env::args_os()));
}
