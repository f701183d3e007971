fn main() {
    let (code, text) = dbcat::cli::run(std::env::args_os());
    if code == 0 {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    std::process::exit(code);
}
