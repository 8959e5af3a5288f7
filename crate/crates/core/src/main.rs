fn main() {
    std::process::exit(consensus_lab::cli::main_with_args(std::env::args_os()));
}
