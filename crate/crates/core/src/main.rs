fn main() {
    let code = fraclap::cli::run(std::env::args_os());
    std::process::exit(code);
}
