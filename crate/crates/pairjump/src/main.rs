fn main() {
    env_logger::init();
    std::process::exit(pairjump::cli::run_cli());
}
