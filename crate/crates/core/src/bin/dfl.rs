fn main() {
    std::process::exit(dfedcata::cli::main_with_args(std::env::args_os()));
}
