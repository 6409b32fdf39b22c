fn main() {
    std::process::exit(edept::cli::run(std::env::args_os()));
}
