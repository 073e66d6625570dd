fn main() {
    std::process::exit(mid_cli::run(std::env::args_os()));
}
