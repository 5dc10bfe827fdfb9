use std::io;
use std::process::ExitCode;

use ringopt::cli::{run, Styling};

fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(
        std::env::args_os(),
        &mut stdout.lock(),
        &mut stderr.lock(),
        Styling::detect(),
    );
    ExitCode::from(code as u8)
}
