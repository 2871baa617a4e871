fn main() {
    std::process::exit(dde_lab::main_with_args(std::env::args_os()));
}
