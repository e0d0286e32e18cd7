use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = hyperell_cli::run(std::env::args_os().skip(1), &mut out, &mut io::stderr());
    let _ = out.flush();
    std::process::exit(code);
}
