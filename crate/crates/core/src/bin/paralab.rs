use std::io::Write;

fn main() {
    let (code, out) = paralab::cli::run_cli(std::env::args().skip(1));
    let mut stream: Box<dyn Write> = if code == 0 || code == 1 {
        Box::new(std::io::stdout())
    } else {
        Box::new(std::io::stderr())
    };
    let _ = stream.write_all(out.as_bytes());
    let _ = stream.flush();
    std::process::exit(code);
}
