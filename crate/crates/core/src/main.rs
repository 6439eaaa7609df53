fn main() {
    std::process::exit(ridgerec::cli::dispatch(std::env::args_os()));
}
