fn main() {
    std::process::exit(twomode_jc::cli::main_with_args(std::env::args_os()));
}
