use std::io::Write;

fn main() {
    let out = qiqp_cli::run(std::env::args_os());
    let mut stream: Box<dyn Write> = if out.code == 2 { Box::new(std::io::stderr()) } else { Box::new(std::io::stdout()) };
    stream.write_all(out.report.as_bytes()).expect("write report");
    std::process::exit(out.code);
}
