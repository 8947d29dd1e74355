fn main() {
    std::process::exit(scramble::cli::run(std::env::args_os()));
}
