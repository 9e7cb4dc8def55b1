fn main() {
    std::process::exit(multmap::cli::run(std::env::args_os()));
}
