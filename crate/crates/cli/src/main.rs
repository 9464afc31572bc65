fn main() {
    std::process::exit(geofront_cli::run_from(std::env::args_os()));
}
