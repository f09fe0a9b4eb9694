fn main() {
    std::process::exit(iifs_dim::cli::run(std::env::args_os()));
}
