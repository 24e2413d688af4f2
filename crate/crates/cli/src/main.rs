fn main() {
    std::process::exit(smash_cli::run());
}
