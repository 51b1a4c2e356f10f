use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use logdmod::cli::{run_file_contents, run_selftest, Format, RunOptions};
use logdmod::ncgb::GbConfig;

#[derive(Parser)]
#[command(name = "logdmod", version, about = "Symbolic engine for logarithmic D-modules on affine idealized log charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a problem file and print the report.
    Run {
        /// problem file (.ldm)
        file: PathBuf,
        /// output format: json or text
        #[arg(long, default_value = "json")]
        format: String,
        /// exit with code 4 when any result is undetermined
        #[arg(long)]
        strict: bool,
        /// Gröbner order refinement override: degrevlex or lex
        #[arg(long)]
        order: Option<String>,
        /// search bound for the split-by-support exponent
        #[arg(long, default_value_t = 32)]
        max_split_exponent: usize,
    },
    /// Run the seeded random-instance property suites.
    Selftest {
        #[arg(long, default_value_t = 17)]
        seed: u64,
        /// instances per suite
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// all, bernstein, restriction, duality, or additivity
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            file,
            format,
            strict,
            order,
            max_split_exponent,
        } => {
            let format = match format.as_str() {
                "json" => Format::Json,
                "text" => Format::Text,
                other => {
                    eprintln!("error: unknown format '{}'", other);
                    return ExitCode::from(2);
                }
            };
            if let Some(o) = &order {
                if o != "degrevlex" && o != "lex" {
                    eprintln!("error: unknown order '{}'", o);
                    return ExitCode::from(2);
                }
            }
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {}", file.display(), e);
                    return ExitCode::from(2);
                }
            };
            let opts = RunOptions {
                format,
                strict,
                max_split_exponent,
                order,
                cfg: GbConfig::from_env(),
            };
            let (code, out) = run_file_contents(&text, &opts);
            if code == 0 || code == 4 {
                print!("{}", out);
            } else {
                eprint!("{}", out);
            }
            ExitCode::from(code as u8)
        }
        Command::Selftest { seed, count, suite } => {
            if !["all", "bernstein", "restriction", "duality", "additivity"]
                .contains(&suite.as_str())
            {
                eprintln!("error: unknown suite '{}'", suite);
                return ExitCode::from(2);
            }
            let cfg = GbConfig::from_env();
            match run_selftest(seed, count, &suite, &cfg) {
                Ok(results) => {
                    let mut ok = true;
                    for r in results {
                        println!("{}", r.line());
                        ok = ok && r.pass();
                    }
                    if ok {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => {
                    eprintln!("error: {}", e);
                    ExitCode::from(3)
                }
            }
        }
    }
}
