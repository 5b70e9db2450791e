fn main() {
    std::process::exit(vorcands::cli::run(std::env::args_os()));
}
