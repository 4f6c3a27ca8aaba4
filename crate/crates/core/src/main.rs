fn main() {
    std::process::exit(thinfilm_spdc::cli::main_with(std::env::args_os()));
}
