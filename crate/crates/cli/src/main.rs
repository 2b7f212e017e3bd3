fn main() {
    std::process::exit(occwalk_cli::main_with_args(std::env::args_os()));
}
