fn main() {
    std::process::exit(minscore::sim::cli_main(std::env::args_os()));
}
