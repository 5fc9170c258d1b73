fn main() {
    std::process::exit(symmwave_cli::run());
}
