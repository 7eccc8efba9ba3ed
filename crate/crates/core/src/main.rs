fn main() {
    std::process::exit(qunit_ghz::cli::main_with_args(std::env::args_os()));
}
