use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use embedtopo::matrices;
use embedtopo::pipeline::{self, PipelineError, RunOptions};

#[derive(Parser)]
#[command(
    name = "embedtopo",
    version,
    about = "Compare sentence embedding spaces through distance matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Also analyse H0 bottleneck matrices.
        #[arg(long)]
        include_h0: bool,
        /// Minimise sup_y d(aX, y) instead of the symmetric Hausdorff distance.
        #[arg(long)]
        directed_hausdorff: bool,
        /// Absolute CCA ridge; 0 selects pseudo-inverse whitening.
        #[arg(long)]
        ridge: Option<f64>,
        /// Override the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a distance-matrix CSV and list every violated invariant.
    Validate {
        #[arg(long)]
        matrix: PathBuf,
        /// Accept +inf entries.
        #[arg(long)]
        allow_infinite: bool,
    },
    /// Run the bundled 20-sentence fixture.
    Demo {
        #[arg(long, default_value = "embedtopo-demo")]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            threads,
            include_h0,
            directed_hausdorff,
            ridge,
            out,
        } => {
            let options = RunOptions {
                threads,
                include_h0,
                directed_hausdorff,
                ridge,
                out_dir: out,
            };
            pipeline::run_config_file(&config, &options).map(|r| {
                println!("{} matrices, {} pair analyses", r.sources.len(), r.pairs.len());
            })
        }
        Command::Validate { matrix, allow_infinite } => validate(&matrix, allow_infinite),
        Command::Demo { out, threads } => embedtopo::demo::run_demo(&out, threads).map(|r| {
            println!(
                "{} matrices, {} pair analyses written to {}",
                r.sources.len(),
                r.pairs.len(),
                out.join("output").display()
            );
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("embedtopo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn validate(path: &std::path::Path, allow_infinite: bool) -> Result<(), PipelineError> {
    let m = matrices::read_csv(path).map_err(|e| PipelineError::Data(e.to_string()))?;
    let violations = matrices::validate(&m, allow_infinite);
    if violations.is_empty() {
        println!("{}: ok ({}x{}, source {})", path.display(), m.n(), m.n(), m.source());
        return Ok(());
    }
    for v in &violations {
        println!("{v}");
    }
    Err(PipelineError::Data(format!(
        "{}: {} violation(s)",
        path.display(),
        violations.len()
    )))
}
