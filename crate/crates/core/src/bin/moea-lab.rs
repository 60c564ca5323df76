fn main() {
    std::process::exit(moea_lab::lab::main());
}
