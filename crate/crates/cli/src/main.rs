use std::io::Write;

fn main() {
    let result = systole_cli::run(std::env::args_os());
    std::io::stdout().write_all(result.stdout.as_bytes()).expect("stdout");
    std::io::stderr().write_all(result.stderr.as_bytes()).expect("stderr");
    std::process::exit(result.code);
}
