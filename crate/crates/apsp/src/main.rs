fn main() -> std::process::ExitCode {
    apsp::cli::main()
}
