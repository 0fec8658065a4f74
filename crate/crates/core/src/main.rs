fn main() {
    std::process::exit(kcontour::cli::run());
}
