fn main() {
    std::process::exit(qwi::cli::run(std::env::args_os()));
}
