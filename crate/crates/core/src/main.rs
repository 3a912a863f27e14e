fn main() {
    std::process::exit(handle_forge::cli::run(std::env::args_os()));
}
