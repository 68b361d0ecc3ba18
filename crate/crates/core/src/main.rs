fn main() {
    std::process::exit(fracml::cli::run(std::env::args_os()));
}
