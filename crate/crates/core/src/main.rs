fn main() {
    std::process::exit(varwords::cli::run(std::env::args_os()));
}
