fn main() {
    std::process::exit(clarkops_cli::run(std::env::args_os()));
}
