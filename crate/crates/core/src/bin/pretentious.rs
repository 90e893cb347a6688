fn main() {
    std::process::exit(pretentious::harness::run_cli(std::env::args_os()));
}
