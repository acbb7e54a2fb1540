fn main() {
    std::process::exit(rcpi::cli::run(std::env::args_os()));
}
