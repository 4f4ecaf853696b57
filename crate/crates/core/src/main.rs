fn main() {
    std::process::exit(fdcontrol::cli::run());
}
