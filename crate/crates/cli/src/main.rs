fn main() {
    std::process::exit(sshsim_cli::run(std::env::args_os()));
}
