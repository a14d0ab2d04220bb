fn main() {
    std::process::exit(clqaoa::cli::run(std::env::args_os()));
}
