fn main() {
    std::process::exit(urysohn_core::cli::dispatch(std::env::args_os()));
}
