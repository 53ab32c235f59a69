fn main() {
    std::process::exit(projpair::cli::main_from_env());
}
