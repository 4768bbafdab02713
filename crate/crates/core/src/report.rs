//! Per-image JSON report.
//!
//! Keys are emitted in this fixed order: `image_path`, `width`, `height`,
//! `background_pixels`, `leaf_pixels`, `faulty_pixels`, `normal_pixels`,
//! `fault_ratio`, `otsu_background_threshold`, `otsu_refine_threshold`,
//! `kmeans_iterations`, `refine_iterations`, `seed`, `config`. The ratio is
//! written with exactly six decimals.

use serde::{Serialize, Serializer};

use crate::pipeline::{PipelineConfig, SegmentationResult};

/// A ratio serialized as a JSON number with six decimal places.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedRatio(pub f64);

impl FixedRatio {
    pub fn formatted(self) -> String {
        // `{:.6}` rounds the exact binary value; exact ties go to even.
        format!("{:.6}", self.0)
    }
}

impl Serialize for FixedRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = serde_json::value::RawValue::from_string(self.formatted()).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub image_path: String,
    pub width: usize,
    pub height: usize,
    pub background_pixels: usize,
    pub leaf_pixels: usize,
    pub faulty_pixels: usize,
    pub normal_pixels: usize,
    pub fault_ratio: FixedRatio,
    pub otsu_background_threshold: u8,
    pub otsu_refine_threshold: Option<u8>,
    pub kmeans_iterations: usize,
    pub refine_iterations: usize,
    pub seed: u64,
    pub config: PipelineConfig,
}

impl AnalysisReport {
    pub fn new(image_path: impl Into<String>, result: &SegmentationResult, config: &PipelineConfig) -> Self {
        Self {
            image_path: image_path.into(),
            width: result.width(),
            height: result.height(),
            background_pixels: result.background_mask.count_ones(),
            leaf_pixels: result.leaf_mask.count_ones(),
            faulty_pixels: result.faulty_mask.count_ones(),
            normal_pixels: result.normal_mask.count_ones(),
            fault_ratio: FixedRatio(result.fault_ratio),
            otsu_background_threshold: result.otsu_background_threshold,
            otsu_refine_threshold: result.otsu_refine_threshold,
            kmeans_iterations: result.cluster_model.iterations,
            refine_iterations: result.refine_iterations,
            seed: config.seed,
            config: config.clone(),
        }
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
