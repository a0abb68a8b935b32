fn main() {
    let code = rankmat::cli::run(std::env::args(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
