fn main() -> std::process::ExitCode {
    pushout_aoi::cli::main()
}
