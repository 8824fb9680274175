fn main() {
    std::process::exit(dichotomy::cli::main_with_args(std::env::args_os()));
}
