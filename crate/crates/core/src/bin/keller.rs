fn main() {
    std::process::exit(keller::cli::run(std::env::args_os()));
}
