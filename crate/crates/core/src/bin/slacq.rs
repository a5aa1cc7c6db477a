fn main() {
    std::process::exit(slacq::cli::run(std::env::args_os()));
}
