fn main() {
    std::process::exit(linkbound::cli::run_from_env());
}
