fn main() {
    std::process::exit(mbvi_bench::run_cli(std::env::args_os()));
}
