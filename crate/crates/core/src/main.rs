fn main() {
    std::process::exit(submodlab::cli::main());
}
