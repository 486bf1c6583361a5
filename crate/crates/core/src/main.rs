fn main() {
    std::process::exit(spin_core::cli::run(std::env::args_os()));
}
