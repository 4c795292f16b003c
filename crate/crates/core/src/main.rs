fn main() {
    std::process::exit(gridpart::cli::main());
}
