fn main() {
    std::process::exit(peisert::cli::run(std::env::args_os()));
}
