//! Fault-area detection for plant leaf photographs.
//!
//! The pipeline clips the background with Otsu's threshold, equalizes the
//! leaf's color channels, clusters leaf pixels with k-means++ and Lloyd
//! iteration, refines the least-green cluster by removing green pixels and
//! re-thresholding, and reports the faulty share of the leaf.
//!
//! ```no_run
//! use leafscan::{analyze, read_image, PipelineConfig};
//!
//! let image = read_image("leaf.ppm")?;
//! let result = analyze(&image, &PipelineConfig::default())?;
//! println!("fault ratio {:.4}", result.fault_ratio);
//! # Ok::<(), leafscan::Error>(())
//! ```

pub mod cli;
pub mod clustering;
pub mod codec;
pub mod error;
pub mod histogram;
pub mod imaging;
pub mod pipeline;
pub mod report;
pub mod synthetic;
pub mod threshold;

pub use codec::{decode_image, encode_image, read_image, write_image, ImageFormat};
pub use error::{Error, Result};
pub use histogram::{compute_histogram, equalize, equalize_rgb, Histogram};
pub use imaging::{overlay, to_grayscale, BinaryMask, GrayImage, Rgb, RgbImage};
pub use pipeline::{analyze, BackgroundMode, LesionClass, PipelineConfig, SegmentationResult};
pub use report::AnalysisReport;
pub use threshold::{binarize, otsu_threshold, OtsuResult};
