fn main() {
    std::process::exit(virial_ansatz::cli::run_from_args(std::env::args_os()));
}
