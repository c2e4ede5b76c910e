fn main() {
    std::process::exit(bbm5::cli::run(std::env::args_os()));
}
