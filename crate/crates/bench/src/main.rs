use std::io::Write;

fn main() {
    let out = univec_bench::cli::run(std::env::args_os());
    std::io::stdout().write_all(&out.stdout).expect("write table");
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
