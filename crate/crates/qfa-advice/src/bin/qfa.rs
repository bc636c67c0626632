fn main() {
    std::process::exit(qfa_advice::cli::main());
}
