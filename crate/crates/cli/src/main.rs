fn main() {
    std::process::exit(conclab_cli::run(std::env::args_os()));
}
