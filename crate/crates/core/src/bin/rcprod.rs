fn main() {
    std::process::exit(rcprod::cli::run(std::env::args_os()));
}
