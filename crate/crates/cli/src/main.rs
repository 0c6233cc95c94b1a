fn main() {
    std::process::exit(efx_cli::run(std::env::args_os()));
}
