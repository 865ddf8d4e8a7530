fn main() {
    std::process::exit(netrw::cli::run());
}
