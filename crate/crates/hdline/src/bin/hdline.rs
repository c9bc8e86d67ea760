fn main() {
    std::process::exit(hdline::cli::run());
}
