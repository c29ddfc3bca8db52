use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use voxelmap_bench::{
    load_config, run_occlusion, run_recall, run_scaling, run_voxel_size_sweep, summary_csv,
    BenchConfig, RunOutput,
};

/// Exit codes: 0 success, 2 configuration or runtime error, 3 threshold
/// check failure under --check.
const EXIT_ERROR: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "bench",
    version,
    about = "Voxel-map query benchmarks: scaling, occlusion, voxel-size sweep, oracle recall"
)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Subcommand)]
enum Experiment {
    /// Query time vs map size on the wall sweep, voxel map vs keyframe baseline
    Scaling(RunArgs),
    /// First-hit occlusion vs keyframe scan at the corridor turn
    Occlusion(RunArgs),
    /// Query time, recall, and precision across voxel sizes
    VoxelSweep(RunArgs),
    /// Recall/precision against the exhaustive oracle on randomized scenes
    Recall(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Key=value config file; omit to run with built-in defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for results.csv, results.gp, and any per-point CSVs
    #[arg(long)]
    out: PathBuf,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with code 3 if any threshold check fails
    #[arg(long)]
    check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args, run): (_, _, fn(&BenchConfig) -> Result<RunOutput, _>) = match cli.experiment
    {
        Experiment::Scaling(a) => ("scaling", a, run_scaling),
        Experiment::Occlusion(a) => ("occlusion", a, run_occlusion),
        Experiment::VoxelSweep(a) => ("voxel-sweep", a, run_voxel_size_sweep),
        Experiment::Recall(a) => ("recall", a, run_recall),
    };

    let mut cfg = match args.config.as_deref() {
        Some(path) => match load_config(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("bench: {e}");
                return ExitCode::from(EXIT_ERROR);
            }
        },
        None => BenchConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }

    let output = match run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("bench: {name}: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    };

    if let Err(e) = write_outputs(&args.out, &output) {
        eprintln!("bench: cannot write results to {}: {e}", args.out.display());
        return ExitCode::from(EXIT_ERROR);
    }

    println!(
        "{name}: {} records -> {}/results.csv, results.gp{}",
        output.records.len(),
        args.out.display(),
        if output.aux_files.is_empty() {
            String::new()
        } else {
            format!(
                ", {}",
                output.aux_files.iter().map(|(f, _)| f.as_str()).collect::<Vec<_>>().join(", ")
            )
        }
    );
    for check in &output.checks {
        println!("{check}");
    }

    if args.check && output.checks.iter().any(|c| !c.passed) {
        eprintln!("bench: {name}: threshold check failed");
        return ExitCode::from(EXIT_CHECK_FAILED);
    }
    ExitCode::SUCCESS
}

fn write_outputs(out_dir: &std::path::Path, output: &RunOutput) -> std::io::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("results.csv"), summary_csv(&output.records))?;
    std::fs::write(out_dir.join("results.gp"), &output.gp)?;
    for (file, contents) in &output.aux_files {
        std::fs::write(out_dir.join(file), contents)?;
    }
    Ok(())
}
