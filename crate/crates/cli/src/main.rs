fn main() {
    std::process::exit(recoil_cli::run(std::env::args_os()));
}
