fn main() {
    std::process::exit(pisynth::cli::run(std::env::args()));
}
