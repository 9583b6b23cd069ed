fn main() {
    std::process::exit(latmesh_cli::run(std::env::args_os()));
}
