fn main() {
    std::process::exit(fvbound::cli::run(std::env::args_os()));
}
