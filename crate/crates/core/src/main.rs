use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use epsmap::augment::AugmentSpec;
use epsmap::batch::{run, Command, DatasetManifest, EdgeOptions, JobConfig, REPORT_FILE};

#[derive(Parser, Debug)]
#[command(name = "epsmap", version, about = "EPS map construction, ablation and evaluation batch jobs")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug)]
struct Common {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the manifest's base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = available parallelism).
    #[arg(long, env = "EPSMAP_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Max per-channel deviation when decoding color-coded segmentations.
    #[arg(long, default_value_t = 0)]
    tolerance: u8,
}

#[derive(Args, Debug)]
struct Thresholds {
    /// Hysteresis low threshold, fraction of full scale.
    #[arg(long, default_value_t = 0.1)]
    low: f64,
    /// Hysteresis high threshold, fraction of full scale.
    #[arg(long, default_value_t = 0.3)]
    high: f64,
}

impl From<Thresholds> for EdgeOptions {
    fn from(t: Thresholds) -> Self {
        EdgeOptions { low: t.low, high: t.high }
    }
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Compose EPS maps from edge maps and segmentations.
    Compose {
        #[command(flatten)]
        common: Common,
        /// Derive edges from each entry's image with the built-in Sobel detector.
        #[arg(long)]
        fallback_edges: bool,
        /// Scale applied to edge intensities before addition.
        #[arg(long, default_value_t = 1.0)]
        edge_gain: f64,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Write fallback Sobel edge maps for each image.
    Edges {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        thresholds: Thresholds,
    },
    /// Kuwahara-smooth images at one or more radii.
    Smooth {
        #[command(flatten)]
        common: Common,
        /// Comma-separated radii; 0 copies the input.
        #[arg(long = "smooth-radius", value_delimiter = ',', required = true)]
        radii: Vec<u32>,
    },
    /// Carve edge maps at one or more levels.
    Carve {
        #[command(flatten)]
        common: Common,
        /// Comma-separated carving iteration counts.
        #[arg(long = "carve-level", value_delimiter = ',', required = true)]
        levels: Vec<u32>,
    },
    /// Warp segmentation maps at one or more levels.
    Warp {
        #[command(flatten)]
        common: Common,
        /// Comma-separated warp levels in pixels.
        #[arg(long = "warp-level", value_delimiter = ',', required = true)]
        levels: Vec<u32>,
    },
    /// Emit randomly rotated, cropped and scaled variants.
    Augment {
        #[command(flatten)]
        common: Common,
        /// Variants per entry.
        #[arg(long, default_value_t = 1)]
        count: u32,
        #[arg(long, default_value_t = 7.0)]
        max_angle: f64,
        #[arg(long, default_value_t = 0.5)]
        min_keep: f64,
        #[arg(long, default_value_t = 0.8)]
        scale_min: f64,
        #[arg(long, default_value_t = 1.2)]
        scale_max: f64,
    },
    /// Emit the 128x72 .. 1024x576 resolution pyramid.
    Pyramid {
        #[command(flatten)]
        common: Common,
    },
    /// Score candidate segmentations against references by IoU.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Reference class excluded from scoring.
        #[arg(long)]
        ignore: Option<u8>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, command) = match cli.command {
        Sub::Compose {
            common,
            fallback_edges,
            edge_gain,
            thresholds,
        } => (
            common,
            Command::Compose {
                fallback_edges,
                edge_gain,
                edges: thresholds.into(),
            },
        ),
        Sub::Edges { common, thresholds } => (common, Command::Edges { edges: thresholds.into() }),
        Sub::Smooth { common, radii } => (common, Command::Smooth { radii }),
        Sub::Carve { common, levels } => (common, Command::Carve { levels }),
        Sub::Warp { common, levels } => (common, Command::Warp { levels }),
        Sub::Augment {
            common,
            count,
            max_angle,
            min_keep,
            scale_min,
            scale_max,
        } => (
            common,
            Command::Augment {
                spec: AugmentSpec {
                    max_angle,
                    min_keep,
                    scale_range: [scale_min, scale_max],
                    seed: 0,
                },
                count,
            },
        ),
        Sub::Pyramid { common } => (common, Command::Pyramid),
        Sub::Eval { common, ignore } => (common, Command::Eval { ignore }),
    };

    let manifest = match DatasetManifest::load(&common.manifest) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let config = JobConfig {
        command,
        out_dir: common.out,
        seed: common.seed,
        jobs: common.jobs,
        tolerance: common.tolerance,
    };
    match run(&manifest, &config) {
        Ok(report) => {
            for entry in report.entries.iter().filter(|e| !e.is_ok()) {
                eprintln!("{}: {}", entry.id, entry.message.as_deref().unwrap_or("failed"));
            }
            println!(
                "{}: {} ok, {} failed; report at {}",
                report.command,
                report.entries.len() - report.failed(),
                report.failed(),
                config.out_dir.join(REPORT_FILE).display()
            );
            if let Some(mean) = report
                .aggregate
                .as_ref()
                .and_then(|a| a.pointer("/overall/overall/mean_iou"))
            {
                println!("mean IoU: {mean}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
