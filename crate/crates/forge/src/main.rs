fn main() {
    std::process::exit(operad_forge::cli::run(std::env::args_os()));
}
