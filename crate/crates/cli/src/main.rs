fn main() {
    std::process::exit(blowlab_cli::run(std::env::args_os()));
}
