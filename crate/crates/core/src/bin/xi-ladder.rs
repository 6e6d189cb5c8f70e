fn main() {
    std::process::exit(xi_ladder::cli::run(std::env::args_os()));
}
