fn main() {
    std::process::exit(tcgre_bench::cli::run(std::env::args_os()));
}
