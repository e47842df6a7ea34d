fn main() {
    std::process::exit(holonomy::cli::main_with_args(std::env::args_os()));
}
