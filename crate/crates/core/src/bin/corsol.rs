fn main() {
    std::process::exit(corsol::cli::main_with(std::env::args_os()));
}
