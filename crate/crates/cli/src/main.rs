use clap::Parser;

fn main() {
    let args = spinphoton_cli::Args::parse();
    if let Err(e) = spinphoton_cli::run(&args) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
