fn main() {
    std::process::exit(nk_interdict::cli::main());
}
