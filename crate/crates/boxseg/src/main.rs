use std::path::PathBuf;

use clap::{Parser, Subcommand};

use boxseg::commands::{
    cmd_eval, cmd_fit_boundary, cmd_gen_pseudo, cmd_gradcheck, cmd_segment, cmd_stats, EvalArgs,
    FitBoundaryArgs, GenPseudoArgs, SegmentArgs, EXIT_INPUT,
};

/// Weak-supervision segmentation toolkit: pseudo-labels from boxes,
/// boundary-map fitting, random-walk + CRF refinement, and evaluation.
#[derive(Parser)]
#[command(name = "boxseg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dataset statistics from an annotation file
    Stats {
        /// COCO-style annotation JSON
        #[arg(long)]
        ann: PathBuf,
        /// Also write the report as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Generate pseudo-label masks from box annotations
    GenPseudo {
        #[arg(long)]
        ann: PathBuf,
        /// Output directory for mask PNGs and the run manifest
        #[arg(long)]
        out: PathBuf,
        /// Directory of per-image activation tensors (<stem>.uact)
        #[arg(long)]
        cam_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Ignore activation tensors even when present
        #[arg(long)]
        no_cam: bool,
    },
    /// Fit boundary probability tensors from label masks
    FitBoundary {
        /// Directory of label-mask PNGs
        #[arg(long)]
        masks: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Produce final segmentation masks from boxes and boundary tensors
    Segment {
        #[arg(long)]
        ann: PathBuf,
        /// Directory of boundary tensors (<stem>.uact)
        #[arg(long)]
        boundaries: PathBuf,
        /// Directory of source images (PNG, grayscale or RGB)
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Run the dense CRF on images larger than the 256x256 guard
        #[arg(long)]
        force_large: bool,
    },
    /// Score predictions against ground-truth masks
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        ann: PathBuf,
        /// Fill boxes whose class is entirely missing from the prediction
        #[arg(long)]
        box_fill: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Audit the pair-loss gradient against finite differences
    Gradcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid side length, at most 64
        #[arg(long, default_value_t = 16)]
        size: u32,
    },
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Stats { ann, csv } => cmd_stats(&ann, csv.as_ref()),
        Command::GenPseudo {
            ann,
            out,
            cam_dir,
            config,
            seed,
            workers,
            no_cam,
        } => cmd_gen_pseudo(&GenPseudoArgs {
            ann,
            out,
            cam_dir,
            config,
            seed,
            workers,
            no_cam,
        }),
        Command::FitBoundary {
            masks,
            out,
            config,
            seed,
            workers,
        } => cmd_fit_boundary(&FitBoundaryArgs {
            masks,
            out,
            config,
            seed,
            workers,
        }),
        Command::Segment {
            ann,
            boundaries,
            images,
            out,
            config,
            workers,
            force_large,
        } => cmd_segment(&SegmentArgs {
            ann,
            boundaries,
            images,
            out,
            config,
            workers,
            force_large,
        }),
        Command::Eval {
            pred,
            gt,
            ann,
            box_fill,
            csv,
        } => cmd_eval(&EvalArgs {
            pred,
            gt,
            ann,
            box_fill,
            csv,
        }),
        Command::Gradcheck { seed, size } => cmd_gradcheck(seed, size),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}
