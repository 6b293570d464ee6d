fn main() {
    std::process::exit(motional_qec::cli::main_with_args(std::env::args_os()));
}
