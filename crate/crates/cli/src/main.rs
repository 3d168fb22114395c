fn main() {
    std::process::exit(hele_shaw_cli::run(std::env::args_os()));
}
