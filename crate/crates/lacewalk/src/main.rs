fn main() {
    std::process::exit(lacewalk::main_with_args(std::env::args_os()));
}
