fn main() {
    std::process::exit(heston_wings::cli::main_with_args(std::env::args_os()));
}
