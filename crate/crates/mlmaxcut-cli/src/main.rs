fn main() {
    std::process::exit(mlmaxcut_cli::run(std::env::args_os()));
}
