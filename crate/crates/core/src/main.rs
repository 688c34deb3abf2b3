fn main() -> std::process::ExitCode {
    boardnet::cli::main()
}
