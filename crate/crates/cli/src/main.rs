fn main() {
    std::process::exit(fkr_cli::commands::main_with(std::env::args_os()));
}
