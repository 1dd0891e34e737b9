use clap::Parser;

use catmod::cli::{run, JobConfig};

fn main() {
    let job = JobConfig::parse();
    let (code, out) = run(&job);
    if code == catmod::cli::EXIT_OK {
        print!("{}", out);
    } else {
        eprint!("{}", out);
    }
    std::process::exit(code);
}
