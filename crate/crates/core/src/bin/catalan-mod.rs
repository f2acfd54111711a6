use std::io;

fn main() {
    let code =
        catalan_automaton::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
