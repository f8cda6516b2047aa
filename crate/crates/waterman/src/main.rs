fn main() {
    std::process::exit(waterman::cli::run(std::env::args().collect()));
}
