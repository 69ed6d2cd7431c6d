fn main() {
    std::process::exit(lpwidths::harness::run(std::env::args_os()));
}
