fn main() {
    std::process::exit(toric_ke::cli::main_with_args(std::env::args_os()));
}
