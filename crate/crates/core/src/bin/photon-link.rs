fn main() {
    std::process::exit(photon_link::cli::run(std::env::args_os()));
}
