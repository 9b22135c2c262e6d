use std::process::ExitCode;

// Deeply nested terms from runaway recursion are walked recursively; give them room.
const STACK_SIZE: usize = 1 << 30;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    env_logger::Builder::new().filter_level(semilog_cli::verbosity(&args)).parse_default_env().init();
    let worker = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || semilog_cli::run(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()))
        .expect("spawn main worker");
    ExitCode::from(worker.join().unwrap_or(101) as u8)
}
