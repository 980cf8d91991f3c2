fn main() {
    std::process::exit(stablegm::cli::run(std::env::args_os()));
}
