fn main() {
    std::process::exit(wiener_sausage::cli::main_with_args(std::env::args_os()));
}
