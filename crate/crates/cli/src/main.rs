fn main() {
    std::process::exit(trotterlab_cli::run(std::env::args_os()));
}
