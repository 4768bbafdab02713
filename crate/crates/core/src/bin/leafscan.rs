fn main() {
    std::process::exit(leafscan::cli::run(std::env::args_os()));
}
