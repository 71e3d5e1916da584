fn main() {
    std::process::exit(ftle_core::cli::run(std::env::args_os()));
}
