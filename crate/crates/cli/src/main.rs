fn main() {
    std::process::exit(dioph::run(std::env::args_os()));
}
