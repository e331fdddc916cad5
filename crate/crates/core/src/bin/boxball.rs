fn main() {
    std::process::exit(boxball::harness::cli::run(std::env::args_os()));
}
