fn main() {
    std::process::exit(leastgrad_cli::run(std::env::args_os()));
}
