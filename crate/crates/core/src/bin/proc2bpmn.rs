fn main() {
    std::process::exit(proc2bpmn::cli::run_command(std::env::args_os()));
}
