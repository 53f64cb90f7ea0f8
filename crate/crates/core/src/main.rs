fn main() {
    std::process::exit(cantorspec::cli::run_from_args(std::env::args_os()));
}
