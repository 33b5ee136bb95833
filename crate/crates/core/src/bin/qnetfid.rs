fn main() { std::process::exit(qnetfid::cli::run()); }
