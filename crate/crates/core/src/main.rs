fn main() {
    std::process::exit(clott::cli::run(std::env::args_os()));
}
