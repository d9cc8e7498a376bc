fn main() {
    std::process::exit(bregopt::cli::cli_main(std::env::args_os()));
}
