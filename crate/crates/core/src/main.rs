fn main() {
    std::process::exit(lorasg::cli::run_from(std::env::args_os()));
}
