//! The JSON front end as a library call: parse a config, run it, print the
//! canonical report. The `dyndeg` binary does the same from a file.

use dyndeg::cli::{parse_config, run};

fn main() {
    let text = std::env::args().nth(1).map_or_else(
        || include_str!("configs/swap.json").to_string(),
        |path| std::fs::read_to_string(path).expect("readable config"),
    );
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(violations) => {
            for v in violations {
                eprintln!("{}: {}", v.pointer, v.message);
            }
            std::process::exit(2);
        }
    };
    match run(&cfg, false) {
        Ok(report) => println!("{}", report.to_json()),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
