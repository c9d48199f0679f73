fn main() {
    std::process::exit(pme_core::cli::run(std::env::args_os()));
}
