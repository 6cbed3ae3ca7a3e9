fn main() {
    std::process::exit(dirty_region_cli::run(std::env::args_os()));
}
