//! 256-bin intensity histograms and histogram equalization.
//!
//! Equalization remaps each level `v` through the inclusive cumulative count
//! `cum[v]`, rescaled so the lowest occupied level lands on 0 and the highest
//! on 255:
//!
//! ```text
//! out = round((cum[v] - cmin) / (N - cmin) * 255)
//! ```
//!
//! where `cmin` is the smallest nonzero cumulative count and `N` the pixel
//! count. Images with a single occupied level are returned unchanged.

use std::fmt::Write as _;
use std::ops::Add;

use crate::error::Result;
use crate::imaging::{require_same_size, BinaryMask, GrayImage, RgbImage};

pub const LEVELS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; LEVELS],
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            counts: [0; LEVELS],
        }
    }
}

impl Histogram {
    pub fn from_counts(counts: [u64; LEVELS]) -> Self {
        Self { counts }
    }

    /// Counts every value in `levels`.
    pub fn from_levels(levels: impl IntoIterator<Item = u8>) -> Self {
        let mut h = Self::default();
        for v in levels {
            h.counts[v as usize] += 1;
        }
        h
    }

    pub fn counts(&self) -> &[u64; LEVELS] {
        &self.counts
    }

    pub fn get(&self, level: u8) -> u64 {
        self.counts[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of levels with a nonzero count.
    pub fn occupied_levels(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn cumulative(&self) -> CumulativeHistogram {
        let mut cum = [0u64; LEVELS];
        let mut running = 0;
        for (c, &n) in cum.iter_mut().zip(&self.counts) {
            running += n;
            *c = running;
        }
        CumulativeHistogram { cum }
    }

    /// Serializes as 256 `level,count` lines with LF endings and no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(LEVELS * 8);
        for (level, count) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{level},{count}");
        }
        out
    }
}

impl Add for &Histogram {
    type Output = Histogram;

    fn add(self, rhs: &Histogram) -> Histogram {
        let mut counts = self.counts;
        for (c, r) in counts.iter_mut().zip(&rhs.counts) {
            *c += r;
        }
        Histogram { counts }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulativeHistogram {
    cum: [u64; LEVELS],
}

impl CumulativeHistogram {
    pub fn values(&self) -> &[u64; LEVELS] {
        &self.cum
    }

    pub fn get(&self, level: u8) -> u64 {
        self.cum[level as usize]
    }

    pub fn total(&self) -> u64 {
        self.cum[LEVELS - 1]
    }

    /// Smallest nonzero cumulative count, i.e. the count of the lowest occupied level.
    pub fn min_nonzero(&self) -> Option<u64> {
        self.cum.iter().copied().find(|&c| c > 0)
    }
}

/// Histogram of `image`, optionally restricted to pixels set in `mask`.
pub fn compute_histogram(image: &GrayImage, mask: Option<&BinaryMask>) -> Result<Histogram> {
    match mask {
        None => Ok(Histogram::from_levels(image.pixels().iter().copied())),
        Some(mask) => {
            require_same_size(image.dimensions(), mask.dimensions())?;
            Ok(Histogram::from_levels(
                image
                    .pixels()
                    .iter()
                    .zip(mask.bits())
                    .filter_map(|(&v, &m)| m.then_some(v)),
            ))
        }
    }
}

pub fn cumulative(hist: &Histogram) -> CumulativeHistogram {
    hist.cumulative()
}

/// Level lookup table that equalizes `hist`, or `None` when the histogram
/// occupies fewer than two levels.
///
/// Levels below the lowest occupied level map to 0.
pub fn equalization_lut(hist: &Histogram) -> Option<[u8; LEVELS]> {
    let cum = hist.cumulative();
    let total = cum.total();
    let cmin = cum.min_nonzero()?;
    if cmin == total {
        return None;
    }
    let span = (total - cmin) as u128;
    let mut lut = [0u8; LEVELS];
    for (out, &c) in lut.iter_mut().zip(cum.values()) {
        let above = c.saturating_sub(cmin) as u128;
        // round-half-up of above * 255 / span in integers
        *out = ((above * 255 * 2 + span) / (2 * span)) as u8;
    }
    Some(lut)
}

pub fn equalize(image: &GrayImage) -> GrayImage {
    equalize_within(image, None).expect("unmasked equalization cannot mismatch")
}

/// Equalizes `image` using only the statistics of pixels set in `mask`; the
/// resulting mapping is applied to every pixel.
pub fn equalize_within(image: &GrayImage, mask: Option<&BinaryMask>) -> Result<GrayImage> {
    let hist = compute_histogram(image, mask)?;
    Ok(match equalization_lut(&hist) {
        Some(lut) => image.map_levels(&lut),
        None => image.clone(),
    })
}

/// Equalizes each RGB channel independently.
pub fn equalize_rgb(image: &RgbImage) -> RgbImage {
    equalize_rgb_within(image, None).expect("unmasked equalization cannot mismatch")
}

/// Per-channel [`equalize_within`].
pub fn equalize_rgb_within(image: &RgbImage, mask: Option<&BinaryMask>) -> Result<RgbImage> {
    let planes = (0..3)
        .map(|c| equalize_within(&image.channel(c), mask))
        .collect::<Result<Vec<_>>>()?;
    RgbImage::from_channels(&planes[0], &planes[1], &planes[2])
}
