fn main() {
    std::process::exit(spectrum_match::cli::parse_and_dispatch(std::env::args_os()));
}
