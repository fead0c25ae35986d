fn main() {
    std::process::exit(petallab::cli::main_with(std::env::args_os()));
}
