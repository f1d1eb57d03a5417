fn main() {
    std::process::exit(specldp::cli::main_exit());
}
