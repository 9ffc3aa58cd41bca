fn main() {
    std::process::exit(sq2lab::main_with(std::env::args_os()));
}
