//! Command-line surface: construction, mutation, walks, certificates,
//! verification suites and DOT export. Output is line-oriented JSON except
//! for `export`, which emits DOT.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tubular::farey::{FareyTriple, Rat};
use tubular::growth::{growth_certificate, walk, Branch};
use tubular::quiver::SeedQuiver;
use tubular::templates::TubularType;
use tubular::tilting::{canonical_config, realize_base, TiltingConfig};
use tubular::verify::{golden_suite, property_suite, CheckReport};

#[derive(Parser)]
#[command(
    name = "tubular",
    about = "Farey triples, quiver mutation and tilting configurations of tubular type",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WeightsArg {
    /// Weight sequence, e.g. 3,3,3
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical configuration of a weight sequence.
    Canonical(WeightsArg),
    /// Print the base realization of the triple {0, 1, ∞} for a tubular
    /// weight sequence.
    RealizeBase(WeightsArg),
    /// Mutate a configuration at one vertex.
    Mutate {
        /// JSON configuration file ("-" for stdin)
        #[arg(long)]
        config: PathBuf,
        /// Zero-based vertex index
        #[arg(long)]
        vertex: usize,
    },
    /// Farey triple operations.
    Farey {
        #[command(subcommand)]
        op: FareyCommand,
    },
    /// Walk a path in the Farey tree, printing one record per node.
    Walk {
        #[command(flatten)]
        weights: WeightsArg,
        /// Branch letters L, M, R (position of the mutated element in the
        /// sorted triple), e.g. L,R,L
        #[arg(long, value_delimiter = ',')]
        path: Vec<String>,
    },
    /// Expand the full Farey ball to a depth and print the certificate.
    Growth {
        #[command(flatten)]
        weights: WeightsArg,
        #[arg(long)]
        depth: u32,
    },
    /// Run a verification suite; exits 1 on the first failing check.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Render a configuration, an exchange matrix, or a seed quiver.
    Export {
        #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
        format: ExportFormat,
        /// JSON configuration file ("-" for stdin); omit with --seed
        #[arg(long, conflicts_with = "seed")]
        config: Option<PathBuf>,
        /// Named seed quiver: D4_11, E6_11, E7_11 or E8_11
        #[arg(long)]
        seed: Option<String>,
    },
}

#[derive(Subcommand)]
enum FareyCommand {
    /// Mutate a triple in one direction.
    Mutate {
        /// The triple, e.g. 0/1,1/1,1/0
        #[arg(long)]
        triple: String,
        /// The element to mutate at, e.g. 1/1
        #[arg(long)]
        at: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Golden,
    Properties,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Canonical(w) => {
            let c = canonical_config(&w.weights)?;
            println!("{}", serde_json::to_string(&c)?);
        }
        Command::RealizeBase(w) => {
            let c = realize_base(&w.weights)?;
            println!("{}", serde_json::to_string(&c)?);
        }
        Command::Mutate { config, vertex } => {
            let c = read_config(&config)?;
            let m = c.mutate(vertex)?;
            println!("{}", serde_json::to_string(&m)?);
        }
        Command::Farey { op } => match op {
            FareyCommand::Mutate { triple, at } => {
                let t: FareyTriple = triple.parse()?;
                let p: Rat = at.parse()?;
                println!("{}", t.mutate(&p)?);
            }
        },
        Command::Walk { weights, path } => {
            let kind = TubularType::from_weights(&weights.weights)?;
            let branches: Vec<Branch> = path
                .iter()
                .map(|s| s.parse())
                .collect::<tubular::Result<_>>()?;
            let cert = walk(kind, &branches)?;
            cert.check(false)?;
            print!("{}", cert.to_json_lines());
        }
        Command::Growth { weights, depth } => {
            let kind = TubularType::from_weights(&weights.weights)?;
            let cert = growth_certificate(kind, depth)?;
            print!("{}", cert.to_json_lines());
            eprintln!(
                "{} distinct configurations, budget {}",
                cert.distinct(),
                cert.budget_k as u64 * depth as u64
            );
        }
        Command::Verify { suite } => {
            let reports = match suite {
                Suite::Golden => golden_suite(),
                Suite::Properties => property_suite(),
            };
            return Ok(print_reports(&reports));
        }
        Command::Export {
            format,
            config,
            seed,
        } => {
            if let Some(name) = seed {
                let m = SeedQuiver::from_name(&name)?.matrix();
                match format {
                    ExportFormat::Dot => print!("{}", m.to_dot()),
                    ExportFormat::Json => println!("{}", serde_json::to_string(&m)?),
                }
            } else {
                let path = config.ok_or("export needs --config or --seed")?;
                let c = read_config(&path)?;
                match format {
                    ExportFormat::Dot => print!("{}", c.to_dot()),
                    ExportFormat::Json => println!("{}", serde_json::to_string(&c)?),
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn read_config(path: &PathBuf) -> Result<TiltingConfig, Box<dyn std::error::Error>> {
    let text = if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        std::fs::read_to_string(path)?
    };
    Ok(serde_json::from_str(&text)?)
}

fn print_reports(reports: &[CheckReport]) -> ExitCode {
    let mut failed = false;
    for r in reports {
        let status = if r.passed { "pass" } else { "FAIL" };
        println!(
            "{}",
            serde_json::json!({
                "check": r.name,
                "status": status,
                "detail": r.detail,
            })
        );
        if !r.passed && !failed {
            failed = true;
        }
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
