fn main() {
    std::process::exit(toepfrac::cli::main_from_env());
}
