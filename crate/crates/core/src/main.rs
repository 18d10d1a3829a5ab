fn main() {
    std::process::exit(kwitness::cli::main_with_args(std::env::args_os()));
}
