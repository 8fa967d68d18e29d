fn main() {
    std::process::exit(bterkit::cli::run(std::env::args_os()));
}
