use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = stochastic_waterfill::cli::main_with_args(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    std::process::exit(code);
}
