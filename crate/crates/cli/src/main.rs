fn main() {
    std::process::exit(qsched_cli::run(std::env::args_os()));
}
