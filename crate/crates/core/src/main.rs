fn main() {
    std::process::exit(stable_trees::cli::run(std::env::args_os()));
}
