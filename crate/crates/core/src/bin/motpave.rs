fn main() {
    std::process::exit(motpave::cli::main_with_args(std::env::args_os()));
}
