use std::process::ExitCode;

mod app;

fn main() -> ExitCode {
    app::run(std::env::args().collect())
}
