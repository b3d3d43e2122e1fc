fn main() {
    std::process::exit(greedy_descent::cli::main_with(std::env::args_os()));
}
