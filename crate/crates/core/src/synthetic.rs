//! Synthetic leaf fixtures with exact ground truth.
//!
//! A leaf is a hard-edged disk centered in a square frame; the lesion is the
//! set of disk pixels nearest to a random point inside the disk, sized to
//! exactly `round(lesion_fraction * disk_pixels)` pixels. Both masks are exact
//! by construction. Optional uniform per-channel noise adds texture to all
//! three regions without touching the masks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::{BinaryMask, Rgb, RgbImage};

pub const LEAF_GREEN: Rgb = [34, 139, 34];
pub const LESION_BROWN: Rgb = [139, 90, 43];
pub const WHITE: Rgb = [255, 255, 255];

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticLeafSpec {
    /// Side length in pixels.
    pub size: usize,
    /// Leaf disk area as a fraction of the frame.
    pub disk_fraction: f64,
    /// Lesion area as a fraction of the leaf disk.
    pub lesion_fraction: f64,
    pub leaf_color: Rgb,
    pub lesion_color: Rgb,
    pub background_color: Rgb,
    /// Maximum per-channel deviation of the additive uniform noise.
    pub noise: u8,
    pub seed: u64,
}

impl Default for SyntheticLeafSpec {
    fn default() -> Self {
        Self {
            size: 256,
            disk_fraction: 0.30,
            lesion_fraction: 0.10,
            leaf_color: LEAF_GREEN,
            lesion_color: LESION_BROWN,
            background_color: WHITE,
            noise: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticLeaf {
    pub image: RgbImage,
    pub disk_mask: BinaryMask,
    pub lesion_mask: BinaryMask,
}

impl SyntheticLeaf {
    /// Lesion pixels over leaf pixels.
    pub fn true_fault_ratio(&self) -> f64 {
        self.lesion_mask.count_ones() as f64 / self.disk_mask.count_ones() as f64
    }
}

fn jitter<R: Rng>(color: Rgb, noise: u8, rng: &mut R) -> Rgb {
    if noise == 0 {
        return color;
    }
    let n = noise as i16;
    color.map(|c| (c as i16 + rng.gen_range(-n..=n)).clamp(0, 255) as u8)
}

pub fn generate(spec: &SyntheticLeafSpec) -> Result<SyntheticLeaf> {
    if spec.size == 0 {
        return Err(Error::InvalidParameter("size must be positive".into()));
    }
    if !(spec.disk_fraction > 0.0 && spec.disk_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "disk fraction must lie in (0, 1], got {}",
            spec.disk_fraction
        )));
    }
    if !(0.0..=1.0).contains(&spec.lesion_fraction) {
        return Err(Error::InvalidParameter(format!(
            "lesion fraction must lie in [0, 1], got {}",
            spec.lesion_fraction
        )));
    }
    let n = spec.size;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let center = n as f64 / 2.0;
    let radius = (spec.disk_fraction * (n * n) as f64 / std::f64::consts::PI).sqrt();
    let offset = |i: usize| i as f64 + 0.5 - center;
    let disk_mask = BinaryMask::from_fn(n, n, |x, y| {
        let (dx, dy) = (offset(x), offset(y));
        dx * dx + dy * dy <= radius * radius
    })?;
    let disk_pixels: Vec<usize> = disk_mask.indices().collect();
    if disk_pixels.is_empty() {
        return Err(Error::InvalidParameter("disk covers no pixel at this size".into()));
    }

    let target = (spec.lesion_fraction * disk_pixels.len() as f64).round() as usize;
    let lesion_radius = (target as f64 / std::f64::consts::PI).sqrt();
    let reach = (radius - lesion_radius - 1.0).max(0.0);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let dist = reach * rng.gen::<f64>().sqrt();
    let (lx, ly) = (center + dist * angle.cos(), center + dist * angle.sin());

    let mut by_distance: Vec<(f64, usize)> = disk_pixels
        .iter()
        .map(|&i| {
            let (x, y) = ((i % n) as f64 + 0.5, (i / n) as f64 + 0.5);
            ((x - lx).powi(2) + (y - ly).powi(2), i)
        })
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut lesion_bits = vec![false; n * n];
    for &(_, i) in &by_distance[..target] {
        lesion_bits[i] = true;
    }
    let lesion_mask = BinaryMask::from_bits(n, n, lesion_bits)?;

    let pixels = (0..n * n)
        .map(|i| {
            let base = if lesion_mask.bits()[i] {
                spec.lesion_color
            } else if disk_mask.bits()[i] {
                spec.leaf_color
            } else {
                spec.background_color
            };
            jitter(base, spec.noise, &mut rng)
        })
        .collect();
    let image = RgbImage::from_pixels(n, n, pixels)?;
    Ok(SyntheticLeaf {
        image,
        disk_mask,
        lesion_mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lesion_share_is_exact_to_one_pixel() {
        let leaf = generate(&SyntheticLeafSpec::default()).unwrap();
        let disk = leaf.disk_mask.count_ones() as f64;
        assert!((leaf.true_fault_ratio() - 0.10).abs() <= 0.5 / disk);
        assert!(leaf.lesion_mask.is_subset_of(&leaf.disk_mask).unwrap());
        let frame = (256 * 256) as f64;
        assert!((disk / frame - 0.30).abs() < 0.01);
    }

    #[test]
    fn no_lesion() {
        let spec = SyntheticLeafSpec {
            lesion_fraction: 0.0,
            ..Default::default()
        };
        let leaf = generate(&spec).unwrap();
        assert!(leaf.lesion_mask.is_clear());
        assert!(leaf.image.pixels().iter().all(|&p| p == LEAF_GREEN || p == WHITE));
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let spec = SyntheticLeafSpec {
            noise: 5,
            seed: 99,
            size: 64,
            ..Default::default()
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = SyntheticLeafSpec { seed: 100, ..spec.clone() };
        assert_ne!(generate(&other).unwrap().image, generate(&spec).unwrap().image);
    }

    #[test]
    fn rejects_bad_specs() {
        for spec in [
            SyntheticLeafSpec { size: 0, ..Default::default() },
            SyntheticLeafSpec { disk_fraction: 0.0, ..Default::default() },
            SyntheticLeafSpec { lesion_fraction: 1.5, ..Default::default() },
        ] {
            assert!(generate(&spec).is_err());
        }
    }
}
