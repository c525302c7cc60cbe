fn main() {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = zalm_cli::run(std::env::args_os(), &mut out) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
