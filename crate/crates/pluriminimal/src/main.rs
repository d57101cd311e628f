fn main() { std::process::exit(pluriminimal::cli::run()); }
