fn main() {
    std::process::exit(psdroot::clibench::main());
}
