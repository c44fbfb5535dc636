fn main() {
    std::process::exit(dctc_superpose::cli::run(std::env::args_os()));
}
