fn main() {
    std::process::exit(mpsh::cli::main_from(std::env::args_os()));
}
