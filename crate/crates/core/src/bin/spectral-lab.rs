fn main() {
    std::process::exit(spectral_lab::cli::dispatch(std::env::args_os()));
}
