fn main() {
    std::process::exit(weilcm::cli::run());
}
