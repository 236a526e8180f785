fn main() {
    std::process::exit(unfoeq::cli::main());
}
