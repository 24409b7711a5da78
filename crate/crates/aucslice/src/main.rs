fn main() {
    std::process::exit(aucslice::cli::run(std::env::args_os()));
}
