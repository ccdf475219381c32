use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let r = crosstalk::cli::run(std::env::args_os());
    print!("{}", r.stdout);
    eprint!("{}", r.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(r.code as u8)
}
