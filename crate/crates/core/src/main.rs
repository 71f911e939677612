fn main() {
    let code = convexcut::cli::run_cli(std::env::args_os(), &mut std::io::stderr());
    std::process::exit(code);
}
