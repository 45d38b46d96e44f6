fn main() {
    std::process::exit(wmra::cli::run(std::env::args_os()));
}
