fn main() {
    std::process::exit(homsense::cli::main_with_args(std::env::args_os()));
}
