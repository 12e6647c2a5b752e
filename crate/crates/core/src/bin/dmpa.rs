fn main() {
    std::process::exit(dmpa_core::runner::cli::run(std::env::args_os()));
}
