fn main() {
    std::process::exit(capsmooth::cli::run(std::env::args_os()));
}
