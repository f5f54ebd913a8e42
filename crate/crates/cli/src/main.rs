fn main() {
    std::process::exit(pbr_cli::run(std::env::args_os()));
}
