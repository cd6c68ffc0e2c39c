fn main() {
    std::process::exit(quasar_cli::cli::main_with_args(std::env::args_os()));
}
