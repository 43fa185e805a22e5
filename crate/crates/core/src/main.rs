fn main() {
    std::process::exit(axmots::cli::run(std::env::args_os()));
}
