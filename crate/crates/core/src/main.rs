fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = nlca_core::frontend::cli::run(&args, &mut std::io::stdin(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
