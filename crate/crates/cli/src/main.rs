use clap::Parser;

fn main() -> std::process::ExitCode {
    let cli = hypgreen_cli::Cli::parse();
    match hypgreen_cli::run(cli) {
        Ok(code) => std::process::ExitCode::from(code as u8),
        Err(err) => {
            // a closed stdout (e.g. piping into `head`) is not a failure
            if let Some(io) = err.downcast_ref::<std::io::Error>() {
                if io.kind() == std::io::ErrorKind::BrokenPipe {
                    return std::process::ExitCode::from(0);
                }
            }
            eprintln!("error: {err:#}");
            std::process::ExitCode::from(1)
        }
    }
}
