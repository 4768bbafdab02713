//! End-to-end leaf analysis.
//!
//! 1. **Background clipping**: Otsu on the gray image splits the frame in two;
//!    one class (by default the one owning most border pixels) is background.
//! 2. **Equalization**: each RGB channel is equalized using leaf statistics only.
//! 3. **Clustering**: k-means++/Lloyd over the equalized leaf colors; the
//!    cluster whose center is least green-dominant is the initial fault region.
//! 4. **Refinement**: green pixels are dropped from the fault region, then Otsu
//!    is run on the leaf gray levels with every non-candidate pixel painted
//!    white (black when the lighter class is kept), and only candidates on the
//!    lesion side of the threshold are kept.
//!    This repeats until the region stops changing.
//! 5. **Ratio**: faulty pixels over leaf pixels.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clustering::{self, ClusterModel, Dataset, LloydParams};
use crate::error::{Error, Result};
use crate::histogram::{compute_histogram, equalize_rgb_within, Histogram};
use crate::imaging::{require_same_size, to_grayscale, BinaryMask, GrayImage, Rgb, RgbImage};
use crate::threshold::{binarize, otsu_threshold};

/// How the background class is picked after the clipping threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackgroundMode {
    /// The class holding the majority of border pixels; the lighter class on a tie.
    #[default]
    BorderMajority,
    LighterClass,
    DarkerClass,
}

/// Which Otsu class the refinement keeps as lesion tissue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LesionClass {
    #[default]
    Darker,
    Lighter,
}

macro_rules! kebab_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const NAMES: &'static [&'static str] = &[$($name),+];

            pub fn name(self) -> &'static str {
                match self { $(<$ty>::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(<$ty>::$variant),)+
                    other => Err(Error::InvalidParameter(format!(
                        "unknown value {other:?}, expected one of {}",
                        Self::NAMES.join(", ")
                    ))),
                }
            }
        }
    };
}

kebab_enum!(BackgroundMode {
    BorderMajority => "border-majority",
    LighterClass => "lighter-class",
    DarkerClass => "darker-class",
});

kebab_enum!(LesionClass {
    Darker => "darker",
    Lighter => "lighter",
});

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub k: usize,
    pub green_margin: f64,
    pub max_refine_iters: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_tol: f64,
    pub seed: u64,
    pub background_mode: BackgroundMode,
    pub lesion_class: LesionClass,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            k: 2,
            green_margin: 0.10,
            max_refine_iters: 10,
            kmeans_max_iters: clustering::DEFAULT_MAX_ITERS,
            kmeans_tol: clustering::DEFAULT_TOL,
            seed: 0,
            background_mode: BackgroundMode::default(),
            lesion_class: LesionClass::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParameter(msg));
        if self.k < 2 {
            return fail(format!("k must be at least 2, got {}", self.k));
        }
        if self.max_refine_iters == 0 {
            return fail("max_refine_iters must be at least 1".into());
        }
        if !(self.green_margin >= 0.0 && self.green_margin.is_finite()) {
            return fail(format!("green_margin must be a finite value >= 0, got {}", self.green_margin));
        }
        if self.kmeans_max_iters == 0 {
            return fail("kmeans_max_iters must be at least 1".into());
        }
        if !(self.kmeans_tol >= 0.0) {
            return fail(format!("kmeans_tol must be >= 0, got {}", self.kmeans_tol));
        }
        Ok(())
    }

    fn lloyd_params(&self) -> LloydParams {
        LloydParams {
            max_iters: self.kmeans_max_iters,
            tol: self.kmeans_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackgroundClip {
    pub background_mask: BinaryMask,
    pub leaf_mask: BinaryMask,
    /// Otsu level on the gray image; the bright class is `gray > threshold`.
    pub threshold: u8,
}

/// Why the refinement loop ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineStop {
    /// The fault mask came out of an iteration unchanged.
    Stable,
    /// The painted leaf histogram had a single level, so Otsu could not split it.
    DegenerateHistogram,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationResult {
    pub background_mask: BinaryMask,
    pub leaf_mask: BinaryMask,
    pub faulty_mask: BinaryMask,
    pub normal_mask: BinaryMask,
    pub otsu_background_threshold: u8,
    /// Threshold of the last refinement pass that could run Otsu, if any did.
    pub otsu_refine_threshold: Option<u8>,
    pub cluster_model: ClusterModel,
    /// Index into `cluster_model.centers` of the initial fault cluster.
    pub faulty_cluster: usize,
    /// The leaf-equalized image the clustering ran on.
    pub equalized: RgbImage,
    pub refine_iterations: usize,
    pub refine_stop: RefineStop,
    pub fault_ratio: f64,
}

impl SegmentationResult {
    pub fn width(&self) -> usize {
        self.leaf_mask.width()
    }

    pub fn height(&self) -> usize {
        self.leaf_mask.height()
    }
}

fn border_counts(mask: &BinaryMask) -> (usize, usize) {
    let (w, h) = mask.dimensions();
    let mut set = 0;
    let mut total = 0;
    for y in 0..h {
        for x in 0..w {
            if y == 0 || y + 1 == h || x == 0 || x + 1 == w {
                total += 1;
                set += mask.get(x, y) as usize;
            }
        }
    }
    (set, total)
}

/// Separates the leaf from the background with a global Otsu threshold.
pub fn clip_background(image: &RgbImage, config: &PipelineConfig) -> Result<BackgroundClip> {
    let gray = to_grayscale(image);
    let hist = compute_histogram(&gray, None)?;
    let otsu = otsu_threshold(&hist)?;
    let bright = binarize(&gray, otsu.threshold);
    let bright_is_background = match config.background_mode {
        BackgroundMode::LighterClass => true,
        BackgroundMode::DarkerClass => false,
        BackgroundMode::BorderMajority => {
            let (bright_border, border) = border_counts(&bright);
            2 * bright_border >= border
        }
    };
    let background_mask = if bright_is_background {
        bright
    } else {
        bright.complement()
    };
    let leaf_mask = background_mask.complement();
    if leaf_mask.is_clear() {
        return Err(Error::NoLeafFound);
    }
    Ok(BackgroundClip {
        background_mask,
        leaf_mask,
        threshold: otsu.threshold,
    })
}

/// Green (or nearly green) pixel test: green must exceed both red and blue by
/// the relative `margin`.
pub fn is_green(pixel: Rgb, margin: f64) -> bool {
    let [r, g, b] = pixel.map(f64::from);
    let scale = 1.0 + margin;
    g > r * scale && g > b * scale
}

/// Green dominance of a center in feature space: `g - (r + b) / 2`.
fn green_dominance(center: &[f64]) -> f64 {
    center[1] - (center[0] + center[2]) / 2.0
}

fn cluster_leaf<R: Rng + ?Sized>(features: &Dataset, config: &PipelineConfig, rng: &mut R) -> Result<ClusterModel> {
    match clustering::lloyd(features, config.k, rng, config.lloyd_params()) {
        // Fewer distinct leaf colors than clusters: cluster what there is.
        Err(Error::InsufficientDistinctPoints { found, .. }) if found >= 1 => {
            clustering::lloyd(features, found, rng, config.lloyd_params())
        }
        other => other,
    }
}

/// Clusters the leaf pixels and refines the fault region.
pub fn segment_faulty<R: Rng + ?Sized>(
    image: &RgbImage,
    clip: &BackgroundClip,
    config: &PipelineConfig,
    rng: &mut R,
) -> Result<SegmentationResult> {
    config.validate()?;
    let leaf = &clip.leaf_mask;
    require_same_size(image.dimensions(), leaf.dimensions())?;
    require_same_size(image.dimensions(), clip.background_mask.dimensions())?;
    if leaf.is_clear() {
        return Err(Error::NoLeafFound);
    }
    let (w, h) = image.dimensions();

    let equalized = equalize_rgb_within(image, Some(leaf))?;
    let leaf_idx: Vec<usize> = leaf.indices().collect();
    let features = Dataset::from_flat(
        3,
        leaf_idx
            .iter()
            .flat_map(|&i| equalized.pixels()[i].map(|c| c as f64 / 255.0))
            .collect(),
    )?;
    let model = cluster_leaf(&features, config, rng)?;
    let faulty_cluster = model
        .centers
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (j, c)| {
            let score = green_dominance(c);
            if score < best.1 {
                (j, score)
            } else {
                best
            }
        })
        .0;

    let mut faulty_bits = vec![false; w * h];
    for (&i, &l) in leaf_idx.iter().zip(&model.labels) {
        faulty_bits[i] = l == faulty_cluster;
    }
    let mut faulty = BinaryMask::from_bits(w, h, faulty_bits)?;

    let green = BinaryMask::from_bits(
        w,
        h,
        image.pixels().iter().map(|&p| is_green(p, config.green_margin)).collect(),
    )?;
    let gray = to_grayscale(&equalized);
    let (refine_iterations, refine_stop, otsu_refine_threshold) =
        refine(&mut faulty, leaf, &green, &gray, config)?;

    let normal_mask = leaf.and_not(&faulty)?;
    let fault_ratio = faulty.count_ones() as f64 / leaf.count_ones() as f64;
    Ok(SegmentationResult {
        background_mask: clip.background_mask.clone(),
        leaf_mask: leaf.clone(),
        faulty_mask: faulty,
        normal_mask,
        otsu_background_threshold: clip.threshold,
        otsu_refine_threshold,
        cluster_model: model,
        faulty_cluster,
        equalized,
        refine_iterations,
        refine_stop,
        fault_ratio,
    })
}

fn refine(
    faulty: &mut BinaryMask,
    leaf: &BinaryMask,
    green: &BinaryMask,
    gray: &GrayImage,
    config: &PipelineConfig,
) -> Result<(usize, RefineStop, Option<u8>)> {
    // Non-candidates sit at the far end from the class being kept.
    let filler = match config.lesion_class {
        LesionClass::Darker => u8::MAX,
        LesionClass::Lighter => u8::MIN,
    };
    let mut threshold = None;
    for iteration in 1..=config.max_refine_iters {
        let candidates = faulty.and_not(green)?;
        let hist = Histogram::from_levels(
            leaf.indices()
                .map(|i| if candidates.bits()[i] { gray.pixels()[i] } else { filler }),
        );
        let t = match otsu_threshold(&hist) {
            Ok(r) => r.threshold,
            Err(Error::DegenerateHistogram) => {
                *faulty = candidates;
                return Ok((iteration, RefineStop::DegenerateHistogram, threshold));
            }
            Err(e) => return Err(e),
        };
        threshold = Some(t);
        let keep = match config.lesion_class {
            LesionClass::Darker => binarize(gray, t).complement(),
            LesionClass::Lighter => binarize(gray, t),
        };
        let next = candidates.and(&keep)?;
        if next == *faulty {
            return Ok((iteration, RefineStop::Stable, threshold));
        }
        *faulty = next;
    }
    Ok((config.max_refine_iters, RefineStop::IterationLimit, threshold))
}

/// Faulty pixels as a fraction of leaf pixels.
pub fn compute_fault_ratio(result: &SegmentationResult) -> Result<f64> {
    let leaf = result.leaf_mask.count_ones();
    if leaf == 0 {
        return Err(Error::NoLeafFound);
    }
    Ok(result.faulty_mask.count_ones() as f64 / leaf as f64)
}

/// Clip, equalize, cluster and refine with an RNG seeded from `config.seed`.
pub fn analyze(image: &RgbImage, config: &PipelineConfig) -> Result<SegmentationResult> {
    config.validate()?;
    let clip = clip_background(image, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    segment_faulty(image, &clip, config, &mut rng)
}

/// Gray-level histograms of the whole leaf and of its two parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionHistograms {
    pub sample: Histogram,
    pub faulty: Histogram,
    pub normal: Histogram,
}

/// Histograms of `image`'s gray plane over the leaf, faulty and normal masks.
///
/// Pass `result.equalized` to histogram the levels the segmentation saw.
pub fn emit_region_histograms(image: &RgbImage, result: &SegmentationResult) -> Result<RegionHistograms> {
    require_same_size(result.leaf_mask.dimensions(), image.dimensions())?;
    let gray = to_grayscale(image);
    Ok(RegionHistograms {
        sample: compute_histogram(&gray, Some(&result.leaf_mask))?,
        faulty: compute_histogram(&gray, Some(&result.faulty_mask))?,
        normal: compute_histogram(&gray, Some(&result.normal_mask))?,
    })
}
