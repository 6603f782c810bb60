fn main() {
    std::process::exit(heis::cli::main());
}
