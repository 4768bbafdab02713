//! Otsu's global threshold and threshold-based masks.
//!
//! Level `t` splits a histogram into class 0 (levels `<= t`) and class 1
//! (levels `> t`). Otsu picks the `t` in `0..=254` that maximizes the
//! between-class variance `w0 * w1 * (mu0 - mu1)^2`, which is the same as
//! minimizing the weighted within-class variance because the two always sum
//! to the total variance. Ties go to the smallest `t`.

use crate::error::{Error, Result};
use crate::histogram::{Histogram, LEVELS};
use crate::imaging::{BinaryMask, GrayImage};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtsuResult {
    pub threshold: u8,
    pub between_class_variance: f64,
    /// `(mu0, mu1)`
    pub class_means: (f64, f64),
    /// `(w0, w1)`
    pub class_weights: (f64, f64),
}

/// Between-class variance from integer class sums.
///
/// `n0`/`s0` are the pixel count and level sum of class 0; `n`/`s` the totals.
fn between_from_sums(n0: u64, s0: u64, n: u64, s: u64) -> (f64, (f64, f64), (f64, f64)) {
    let n1 = n - n0;
    let s1 = s - s0;
    let w0 = n0 as f64 / n as f64;
    let w1 = n1 as f64 / n as f64;
    if n0 == 0 || n1 == 0 {
        let mean = s as f64 / n as f64;
        return (0.0, (mean, mean), (w0, w1));
    }
    let mu0 = s0 as f64 / n0 as f64;
    let mu1 = s1 as f64 / n1 as f64;
    let d = mu0 - mu1;
    (w0 * w1 * d * d, (mu0, mu1), (w0, w1))
}

pub fn otsu_threshold(hist: &Histogram) -> Result<OtsuResult> {
    if hist.occupied_levels() < 2 {
        return Err(Error::DegenerateHistogram);
    }
    let counts = hist.counts();
    let n = hist.total();
    let s: u64 = counts.iter().enumerate().map(|(i, &c)| i as u64 * c).sum();

    let mut best: Option<OtsuResult> = None;
    let (mut n0, mut s0) = (0u64, 0u64);
    for t in 0..LEVELS - 1 {
        n0 += counts[t];
        s0 += t as u64 * counts[t];
        let (between, means, weights) = between_from_sums(n0, s0, n, s);
        if best.is_none_or(|b| between > b.between_class_variance) {
            best = Some(OtsuResult {
                threshold: t as u8,
                between_class_variance: between,
                class_means: means,
                class_weights: weights,
            });
        }
    }
    Ok(best.expect("at least one candidate threshold"))
}

/// Full two-class decomposition of a histogram at one threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassStatistics {
    pub weights: (f64, f64),
    pub means: (f64, f64),
    pub variances: (f64, f64),
    pub between: f64,
    /// `w0 * var0 + w1 * var1`
    pub within: f64,
}

/// Class weights, means and variances for the split at `t`.
///
/// Returns `None` for an empty histogram. An empty class contributes zero
/// weight and zero variance.
pub fn class_statistics(hist: &Histogram, t: u8) -> Option<ClassStatistics> {
    let n = hist.total();
    if n == 0 {
        return None;
    }
    let counts = hist.counts();
    let split = t as usize + 1;
    let (n0, s0) = counts[..split]
        .iter()
        .enumerate()
        .fold((0u64, 0u64), |(c, s), (i, &k)| (c + k, s + i as u64 * k));
    let s: u64 = counts.iter().enumerate().map(|(i, &c)| i as u64 * c).sum();
    let (between, means, weights) = between_from_sums(n0, s0, n, s);

    let spread = |range: std::ops::Range<usize>, mean: f64, count: u64| {
        if count == 0 {
            return 0.0;
        }
        let sq: f64 = range
            .map(|i| {
                let d = i as f64 - mean;
                counts[i] as f64 * d * d
            })
            .sum();
        sq / count as f64
    };
    let var0 = spread(0..split, means.0, n0);
    let var1 = spread(split..LEVELS, means.1, n - n0);
    Some(ClassStatistics {
        weights,
        means,
        variances: (var0, var1),
        between,
        within: weights.0 * var0 + weights.1 * var1,
    })
}

/// Sets every pixel strictly brighter than `t`.
pub fn binarize(image: &GrayImage, t: u8) -> BinaryMask {
    let bits = image.pixels().iter().map(|&v| v > t).collect();
    BinaryMask::from_bits(image.width(), image.height(), bits)
        .expect("mask shares the image dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(usize, u64)]) -> Histogram {
        let mut counts = [0; LEVELS];
        for &(l, c) in pairs {
            counts[l] = c;
        }
        Histogram::from_counts(counts)
    }

    #[test]
    fn two_deltas_pick_the_lower_edge() {
        let r = otsu_threshold(&hist(&[(50, 10), (200, 10)])).unwrap();
        assert_eq!(r.threshold, 50);
        assert_eq!(r.class_means, (50.0, 200.0));
        assert_eq!(r.class_weights, (0.5, 0.5));
        assert_eq!(r.between_class_variance, 0.25 * 150.0 * 150.0);
    }

    #[test]
    fn extreme_levels() {
        let r = otsu_threshold(&hist(&[(0, 1), (255, 1)])).unwrap();
        assert_eq!(r.threshold, 0);
    }

    #[test]
    fn three_level_mixture() {
        // Brute-force scan: class means 11 and 200, weights 0.8/0.2.
        let r = otsu_threshold(&hist(&[(10, 8), (12, 8), (200, 4)])).unwrap();
        assert_eq!(r.threshold, 12);
        assert!((r.between_class_variance - 5715.36).abs() < 1e-9);
    }

    #[test]
    fn degenerate_histograms() {
        assert!(matches!(otsu_threshold(&Histogram::default()), Err(Error::DegenerateHistogram)));
        assert!(matches!(otsu_threshold(&hist(&[(9, 100)])), Err(Error::DegenerateHistogram)));
    }

    #[test]
    fn class_statistics_decompose() {
        let h = hist(&[(10, 3), (20, 1), (90, 4)]);
        let st = class_statistics(&h, 20).unwrap();
        assert_eq!(st.weights, (0.5, 0.5));
        assert_eq!(st.means, (12.5, 90.0));
        assert!((st.variances.0 - 18.75).abs() < 1e-12);
        assert_eq!(st.variances.1, 0.0);
        assert!(class_statistics(&Histogram::default(), 0).is_none());
    }

    #[test]
    fn binarize_examples() {
        let img = GrayImage::from_pixels(3, 1, vec![0, 100, 200]).unwrap();
        assert!(binarize(&img, 255).is_clear());
        assert_eq!(binarize(&img, 100).bits(), &[false, false, true]);
        let bright = GrayImage::from_pixels(2, 1, vec![1, 9]).unwrap();
        assert_eq!(binarize(&bright, 0).count_ones(), 2);
    }

    #[test]
    fn popcount_non_increasing_in_threshold() {
        let px: Vec<u8> = (0..=255).rev().collect();
        let img = GrayImage::from_pixels(16, 16, px).unwrap();
        let counts: Vec<usize> = (0..=255u8).map(|t| binarize(&img, t).count_ones()).collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]));
    }
}
