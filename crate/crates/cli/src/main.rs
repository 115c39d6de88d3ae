use clap::Parser;

fn main() {
    let args = nullctl_cli::Args::parse();
    std::process::exit(nullctl_cli::main_with(&args));
}
