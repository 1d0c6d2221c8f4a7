fn main() {
    std::process::exit(qpoisson::cli::run(std::env::args_os()));
}
