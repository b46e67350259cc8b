fn main() {
    std::process::exit(mapca_cli::run());
}
