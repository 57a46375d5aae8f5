fn main() {
    std::process::exit(surfrec_pipeline::cli::run(std::env::args_os()));
}
