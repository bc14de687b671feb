fn main() {
    std::process::exit(adaptest_cli::run(std::env::args_os()));
}
