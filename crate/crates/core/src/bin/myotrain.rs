fn main() {
    std::process::exit(myotrain::gateway::cli::main_from(std::env::args_os()));
}
