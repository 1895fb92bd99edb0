fn main() {
    std::process::exit(qipm::run_cli());
}
