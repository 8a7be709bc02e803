fn main() {
    std::process::exit(bangbang_pg::cli::run(std::env::args_os()));
}
