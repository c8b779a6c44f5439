fn main() {
    std::process::exit(divminer_cli::main_impl());
}
