fn main() {
    std::process::exit(trianalytic::cli::run(std::env::args_os()));
}
