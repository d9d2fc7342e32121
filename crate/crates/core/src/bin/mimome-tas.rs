fn main() {
    std::process::exit(mimome_tas::cli::main_with_args(std::env::args_os()));
}
