fn main() {
    std::process::exit(morphtok_cli::run(std::env::args_os()));
}
