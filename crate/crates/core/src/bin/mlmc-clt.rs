fn main() {
    std::process::exit(mlmc_clt::cli::run(std::env::args_os()));
}
