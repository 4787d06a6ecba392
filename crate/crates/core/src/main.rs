fn main() -> std::process::ExitCode {
    cwm_core::cli::main()
}
