fn main() {
    std::process::exit(mudom_cli::run(std::env::args_os()));
}
