fn main() -> std::process::ExitCode {
    noise_verify::cli::run()
}
