fn main() {
    std::process::exit(quasicircle::cli::main_with_args(std::env::args_os()));
}
