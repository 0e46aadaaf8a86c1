fn main() { std::process::exit(dyntobit::cli::run(std::env::args_os())); }
