fn main() {
    std::process::exit(hilbert_forge::cli::run());
}
