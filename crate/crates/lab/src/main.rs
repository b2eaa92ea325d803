fn main() {
    std::process::exit(cburgers_lab::cli::main(std::env::args_os()));
}
