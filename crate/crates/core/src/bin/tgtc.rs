fn main() {
    std::process::exit(textgraph::cli::run(std::env::args_os()));
}
