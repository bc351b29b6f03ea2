fn main() {
    std::process::exit(udsf::cli::run(std::env::args_os()));
}
