fn main() {
    std::process::exit(geofs::cli::run(std::env::args_os()));
}
