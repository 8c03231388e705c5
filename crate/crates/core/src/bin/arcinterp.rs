fn main() {
    std::process::exit(arcinterp::cli::cli_main(std::env::args_os()));
}
