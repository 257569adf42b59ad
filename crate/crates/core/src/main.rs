fn main() {
    let code = pses::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
