use std::process::ExitCode;

use nodalsim::config::{parse_config, SEED_ENV};
use nodalsim::run_experiment;

fn main() -> ExitCode {
    let seed_env = std::env::var(SEED_ENV).ok();
    let (cfg, out_dir) = match parse_config(std::env::args_os(), seed_env.as_deref()) {
        Ok(v) => v,
        Err(nodalsim::config::ConfigError::Args(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("# effective configuration\n{}\n", cfg.to_toml());
    match run_experiment(&cfg, Some(&out_dir)) {
        Ok(out) => {
            print!("{}", out.report.to_text());
            println!("wrote {}", out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
