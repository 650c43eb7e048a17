fn main() {
    std::process::exit(cretan_forge_cli::main_with_env());
}
