fn main() -> std::process::ExitCode {
    plagdet::service::cli::main()
}
