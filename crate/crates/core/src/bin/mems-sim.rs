fn main() {
    std::process::exit(mems_core::cli::run(std::env::args_os()));
}
