fn main() {
    std::process::exit(intervalis::cli::dispatch(std::env::args_os()));
}
