//! Command-line front end.
//!
//! ```text
//! leafscan analyze <inputs...> [--out DIR] [--seed N] [--k N] [--green-margin F]
//!                  [--max-refine-iters N] [--kmeans-max-iters N] [--kmeans-tol F]
//!                  [--background-mode MODE] [--lesion-class CLASS]
//!                  [--format pgm|png] [--jobs N]
//! leafscan synth [--size N] [--disk-fraction F] [--lesion-fraction F] [--noise N]
//!                [--leaf-color R,G,B] [--lesion-color R,G,B] [--background-color R,G,B]
//!                [--seed N] [--out DIR] [--name STEM]
//! ```
//!
//! Random choices come from a ChaCha8 stream seeded with `--seed`, so a report
//! is reproducible from its inputs and flags alone.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 malformed or unsupported image (or
//! bad arguments), 3 degenerate analysis. In a batch the worst code wins.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::codec::{decode_image, write_image, ImageFormat};
use crate::error::Error;
use crate::imaging::{overlay, Rgb};
use crate::pipeline::{analyze, emit_region_histograms, BackgroundMode, LesionClass, PipelineConfig};
use crate::report::{AnalysisReport, FixedRatio};
use crate::synthetic::{self, SyntheticLeafSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_BAD_IMAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Tint used to mark faulty pixels in overlays.
pub const FAULT_TINT: Rgb = [255, 0, 0];

#[derive(Debug, Parser)]
#[command(name = "leafscan", version, about = "Detect diseased regions on plant leaf photographs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment leaf images and write masks, overlays, histograms and reports.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic leaf with ground-truth lesion and disk masks.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MaskFormat {
    Pgm,
    Png,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Image files or directories of images (.ppm, .pgm, .pnm, .png).
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.10)]
    green_margin: f64,
    #[arg(long, default_value_t = 10)]
    max_refine_iters: usize,
    #[arg(long, default_value_t = crate::clustering::DEFAULT_MAX_ITERS)]
    kmeans_max_iters: usize,
    #[arg(long, default_value_t = crate::clustering::DEFAULT_TOL)]
    kmeans_tol: f64,
    #[arg(long, default_value = "border-majority")]
    background_mode: BackgroundMode,
    #[arg(long, default_value = "darker")]
    lesion_class: LesionClass,
    /// Format for mask and overlay images.
    #[arg(long, value_enum, default_value = "pgm")]
    format: MaskFormat,
    /// Number of images processed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_color(s: &str) -> Result<Rgb, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected R,G,B, got {s:?}"));
    }
    let mut rgb = [0u8; 3];
    for (c, p) in rgb.iter_mut().zip(parts) {
        *c = p.parse().map_err(|_| format!("channel {p:?} is not an integer in 0..=255"))?;
    }
    Ok(rgb)
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 0.30)]
    disk_fraction: f64,
    #[arg(long, default_value_t = 0.10)]
    lesion_fraction: f64,
    /// Maximum per-channel noise amplitude.
    #[arg(long, default_value_t = 0)]
    noise: u8,
    #[arg(long, value_parser = parse_color, default_value = "34,139,34")]
    leaf_color: Rgb,
    #[arg(long, value_parser = parse_color, default_value = "139,90,43")]
    lesion_color: Rgb,
    #[arg(long, value_parser = parse_color, default_value = "255,255,255")]
    background_color: Rgb,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// File stem for the three outputs.
    #[arg(long, default_value = "leaf")]
    name: String,
}

/// Maps an error to the process exit code it should produce.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::MalformedImage(_) | Error::UnsupportedFormat(_) | Error::DimensionMismatch { .. } => EXIT_BAD_IMAGE,
        Error::DegenerateHistogram | Error::InsufficientDistinctPoints { .. } | Error::NoLeafFound => EXIT_DEGENERATE,
        Error::InvalidParameter(_) => EXIT_BAD_IMAGE,
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_IMAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match cli.command {
        Command::Analyze(args) => run_analyze(&args, out, err),
        Command::Synth(args) => run_synth(&args, out, err),
    }
}

fn is_image_path(path: &Path) -> bool {
    ImageFormat::from_extension(path).is_some()
}

fn expand_inputs(inputs: &[PathBuf]) -> Vec<PathBuf> {
    let mut expanded = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = match std::fs::read_dir(input) {
                Ok(entries) => entries
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.is_file() && is_image_path(p))
                    .collect(),
                // Unreadable directories surface as an I/O error when processed.
                Err(_) => vec![input.clone()],
            };
            found.sort();
            expanded.extend(found);
        } else {
            expanded.push(input.clone());
        }
    }
    expanded
}

struct Outcome {
    path: PathBuf,
    result: Result<f64, Error>,
}

fn analyze_one(path: &Path, args: &AnalyzeArgs, config: &PipelineConfig) -> Result<f64, Error> {
    let bytes = std::fs::read(path)?;
    let image = decode_image(&bytes, None)?;
    let result = analyze(&image, config)?;

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_owned());
    let image_format = match args.format {
        MaskFormat::Pgm => ImageFormat::Pgm,
        MaskFormat::Png => ImageFormat::Png,
    };
    let overlay_format = match args.format {
        MaskFormat::Pgm => ImageFormat::Ppm,
        MaskFormat::Png => ImageFormat::Png,
    };
    let out = |suffix: &str| args.out.join(format!("{stem}.{suffix}"));

    let mask_ext = image_format.extension();
    write_image(out(&format!("faulty.{mask_ext}")), &result.faulty_mask, image_format)?;
    write_image(out(&format!("normal.{mask_ext}")), &result.normal_mask, image_format)?;
    let painted = overlay(&image, &result.faulty_mask, FAULT_TINT)?;
    write_image(out(&format!("overlay.{}", overlay_format.extension())), &painted, overlay_format)?;

    let hists = emit_region_histograms(&result.equalized, &result)?;
    std::fs::write(out("sample.hist.csv"), hists.sample.to_csv())?;
    std::fs::write(out("faulty.hist.csv"), hists.faulty.to_csv())?;
    std::fs::write(out("normal.hist.csv"), hists.normal.to_csv())?;

    let report = AnalysisReport::new(path.display().to_string(), &result, config);
    std::fs::write(out("report.json"), report.to_json())?;
    Ok(result.fault_ratio)
}

fn run_analyze(args: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = PipelineConfig {
        k: args.k,
        green_margin: args.green_margin,
        max_refine_iters: args.max_refine_iters,
        kmeans_max_iters: args.kmeans_max_iters,
        kmeans_tol: args.kmeans_tol,
        seed: args.seed,
        background_mode: args.background_mode,
        lesion_class: args.lesion_class,
    };
    if let Err(e) = config.validate() {
        let _ = writeln!(err, "leafscan: {e}");
        return EXIT_BAD_IMAGE;
    }
    if args.jobs == 0 {
        let _ = writeln!(err, "leafscan: --jobs must be at least 1");
        return EXIT_BAD_IMAGE;
    }
    if let Err(e) = std::fs::create_dir_all(&args.out) {
        let _ = writeln!(err, "leafscan: cannot create {}: {e}", args.out.display());
        return EXIT_IO;
    }

    let inputs = expand_inputs(&args.inputs);
    let process = |path: &PathBuf| Outcome {
        path: path.clone(),
        result: analyze_one(path, args, &config),
    };
    let outcomes: Vec<Outcome> = if args.jobs == 1 {
        inputs.iter().map(process).collect()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(args.jobs).build() {
            Ok(pool) => pool.install(|| inputs.par_iter().map(process).collect()),
            Err(e) => {
                let _ = writeln!(err, "leafscan: cannot start worker pool: {e}");
                return EXIT_IO;
            }
        }
    };

    let mut code = EXIT_OK;
    for o in outcomes {
        match o.result {
            Ok(ratio) => {
                let _ = writeln!(out, "{} fault_ratio={}", o.path.display(), FixedRatio(ratio).formatted());
            }
            Err(e) => {
                let _ = writeln!(err, "leafscan: {}: {e}", o.path.display());
                code = code.max(exit_code(&e));
            }
        }
    }
    code
}

fn run_synth(args: &SynthArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let spec = SyntheticLeafSpec {
        size: args.size,
        disk_fraction: args.disk_fraction,
        lesion_fraction: args.lesion_fraction,
        leaf_color: args.leaf_color,
        lesion_color: args.lesion_color,
        background_color: args.background_color,
        noise: args.noise,
        seed: args.seed,
    };
    let leaf = match synthetic::generate(&spec) {
        Ok(leaf) => leaf,
        Err(e) => {
            let _ = writeln!(err, "leafscan: {e}");
            return exit_code(&e);
        }
    };
    let write_all = || -> Result<(), Error> {
        std::fs::create_dir_all(&args.out)?;
        let path = |suffix: &str| args.out.join(format!("{}.{suffix}", args.name));
        write_image(path("ppm"), &leaf.image, ImageFormat::Ppm)?;
        write_image(path("lesion.pgm"), &leaf.lesion_mask, ImageFormat::Pgm)?;
        write_image(path("disk.pgm"), &leaf.disk_mask, ImageFormat::Pgm)?;
        Ok(())
    };
    match write_all() {
        Ok(()) => {
            let _ = writeln!(
                out,
                "{} lesion_pixels={} disk_pixels={} true_ratio={}",
                args.out.join(format!("{}.ppm", args.name)).display(),
                leaf.lesion_mask.count_ones(),
                leaf.disk_mask.count_ones(),
                FixedRatio(leaf.true_fault_ratio()).formatted()
            );
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "leafscan: {e}");
            EXIT_IO
        }
    }
}
