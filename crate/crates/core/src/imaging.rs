//! In-memory image types and the pixel-level operations shared by the rest of
//! the crate.
//!
//! Every image is stored row-major with the origin at the top-left corner, so
//! pixel `(x, y)` lives at index `y * width + x`.

use crate::error::{Error, Result};

/// An 8-bit RGB triplet.
pub type Rgb = [u8; 3];

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    match width.checked_mul(height) {
        Some(n) if n == len => Ok(()),
        _ => Err(Error::InvalidParameter(format!(
            "{width}x{height} image needs {} pixels, got {len}",
            width.saturating_mul(height)
        ))),
    }
}

fn ensure_same_size(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RgbImage {
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// An image filled with a single color.
    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self> {
        let n = width.checked_mul(height).unwrap_or(0);
        Self::from_pixels(width, height, vec![color; n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn into_pixels(self) -> Vec<Rgb> {
        self.pixels
    }

    /// Extracts one channel (0 = red, 1 = green, 2 = blue) as a gray plane.
    pub fn channel(&self, c: usize) -> GrayImage {
        assert!(c < 3, "channel index out of range: {c}");
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|p| p[c]).collect(),
        }
    }

    /// Reassembles an image from three equally sized channel planes.
    pub fn from_channels(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<Self> {
        ensure_same_size(r.dimensions(), g.dimensions())?;
        ensure_same_size(r.dimensions(), b.dimensions())?;
        let pixels = r
            .pixels
            .iter()
            .zip(&g.pixels)
            .zip(&b.pixels)
            .map(|((&r, &g), &b)| [r, g, b])
            .collect();
        Ok(Self {
            width: r.width,
            height: r.height,
            pixels,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Applies a 256-entry lookup table to every pixel.
    pub fn map_levels(&self, lut: &[u8; 256]) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| lut[v as usize]).collect(),
        }
    }

    /// Promotes each gray level to an `(v, v, v)` triplet.
    pub fn to_rgb(&self) -> RgbImage {
        RgbImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| [v, v, v]).collect(),
        }
    }
}

/// Per-pixel region membership.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn new(width: usize, height: usize, value: bool) -> Result<Self> {
        let n = width.checked_mul(height).unwrap_or(0);
        Self::from_bits(width, height, vec![value; n])
    }

    /// Builds a mask by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut bits = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::from_bits(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn count_zeros(&self) -> usize {
        self.bits.len() - self.count_ones()
    }

    /// True when no pixel is set.
    pub fn is_clear(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn complement(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a || b)
    }

    /// Pixels set in `self` but not in `other`.
    pub fn and_not(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.zip_with(other, |a, b| a && !b)
    }

    /// True when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> Result<bool> {
        ensure_same_size(self.dimensions(), other.dimensions())?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b))
    }

    /// Indices (row-major) of set pixels.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    /// Renders the mask as a gray image with 0 for unset and 255 for set pixels.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> Result<BinaryMask> {
        ensure_same_size(self.dimensions(), other.dimensions())?;
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        })
    }
}

/// BT.601 luma of one pixel, rounded half-up.
pub fn luma(p: Rgb) -> u8 {
    // Integer weights in thousandths keep the half-up rounding exact.
    let weighted = 299 * p[0] as u32 + 587 * p[1] as u32 + 114 * p[2] as u32;
    ((weighted + 500) / 1000).min(255) as u8
}

pub fn to_grayscale(image: &RgbImage) -> GrayImage {
    GrayImage {
        width: image.width,
        height: image.height,
        pixels: image.pixels.iter().map(|&p| luma(p)).collect(),
    }
}

/// Paints `tint` over every pixel selected by `mask`.
pub fn overlay(image: &RgbImage, mask: &BinaryMask, tint: Rgb) -> Result<RgbImage> {
    ensure_same_size(image.dimensions(), mask.dimensions())?;
    let pixels = image
        .pixels
        .iter()
        .zip(&mask.bits)
        .map(|(&p, &m)| if m { tint } else { p })
        .collect();
    Ok(RgbImage {
        width: image.width,
        height: image.height,
        pixels,
    })
}

pub(crate) fn require_same_size(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    ensure_same_size(expected, actual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert!(RgbImage::from_pixels(0, 1, vec![]).is_err());
        assert!(RgbImage::from_pixels(2, 2, vec![[0; 3]; 3]).is_err());
        assert!(GrayImage::from_pixels(2, 1, vec![1, 2]).is_ok());
        assert!(BinaryMask::from_bits(1, 3, vec![true; 2]).is_err());
    }

    #[test]
    fn grayscale_reference_values() {
        assert_eq!(luma([255, 255, 255]), 255);
        assert_eq!(luma([0, 0, 0]), 0);
        // 0.299 * 255 = 76.245
        assert_eq!(luma([255, 0, 0]), 76);
        // 0.587 * 255 = 149.685, 0.114 * 255 = 29.07
        assert_eq!(luma([0, 255, 0]), 150);
        assert_eq!(luma([0, 0, 255]), 29);
    }

    #[test]
    fn grayscale_rounds_half_up() {
        // 0.299 * 50 = 14.95; 0.299 * 10 + 0.114 * 5 = 3.56
        assert_eq!(luma([50, 0, 0]), 15);
        assert_eq!(luma([10, 0, 5]), 4);
        // 0.114 * 250 = 28.5 exactly
        assert_eq!(luma([0, 0, 250]), 29);
    }

    #[test]
    fn overlay_cases() {
        let img = RgbImage::from_pixels(2, 1, vec![[1, 2, 3], [4, 5, 6]]).unwrap();
        let none = BinaryMask::new(2, 1, false).unwrap();
        assert_eq!(overlay(&img, &none, [9, 9, 9]).unwrap(), img);

        let all = BinaryMask::new(2, 1, true).unwrap();
        let red = overlay(&img, &all, [255, 0, 0]).unwrap();
        assert!(red.pixels().iter().all(|&p| p == [255, 0, 0]));

        let first = BinaryMask::from_bits(2, 1, vec![true, false]).unwrap();
        let out = overlay(&img, &first, [255, 0, 0]).unwrap();
        assert_eq!(out.pixels(), &[[255, 0, 0], [4, 5, 6]]);

        let wrong = BinaryMask::new(1, 2, true).unwrap();
        assert!(matches!(
            overlay(&img, &wrong, [0, 0, 0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mask_algebra() {
        let a = BinaryMask::from_bits(4, 1, vec![true, true, false, false]).unwrap();
        let b = BinaryMask::from_bits(4, 1, vec![true, false, true, false]).unwrap();
        assert_eq!(a.and(&b).unwrap().bits(), &[true, false, false, false]);
        assert_eq!(a.or(&b).unwrap().bits(), &[true, true, true, false]);
        assert_eq!(a.and_not(&b).unwrap().bits(), &[false, true, false, false]);
        assert_eq!(a.count_ones() + a.complement().count_ones(), 4);
        assert!(a.and(&b).unwrap().is_subset_of(&a).unwrap());
        assert!(!b.is_subset_of(&a).unwrap());
        assert_eq!(a.indices().collect::<Vec<_>>(), vec![0, 1]);
    }

    fn rgb_image() -> impl Strategy<Value = RgbImage> {
        (1usize..8, 1usize..8).prop_flat_map(|(w, h)| {
            prop::collection::vec(any::<[u8; 3]>(), w * h)
                .prop_map(move |px| RgbImage::from_pixels(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn grayscale_is_pointwise(img in rgb_image()) {
            let gray = to_grayscale(&img);
            let mut reversed = img.pixels().to_vec();
            reversed.reverse();
            let rev = RgbImage::from_pixels(img.width(), img.height(), reversed).unwrap();
            let mut expected = gray.pixels().to_vec();
            expected.reverse();
            let out = to_grayscale(&rev);
            prop_assert_eq!(out.pixels(), &expected[..]);
        }

        #[test]
        fn overlay_changes_only_masked_pixels(img in rgb_image(), seed in any::<u64>()) {
            let (w, h) = img.dimensions();
            let mask = BinaryMask::from_fn(w, h, |x, y| (seed >> ((x + y * w) % 64)) & 1 == 1).unwrap();
            let tint = [1, 254, 7];
            let out = overlay(&img, &mask, tint).unwrap();
            prop_assert_eq!(out.dimensions(), img.dimensions());
            for ((a, b), &m) in img.pixels().iter().zip(out.pixels()).zip(mask.bits()) {
                if m { prop_assert_eq!(*b, tint) } else { prop_assert_eq!(a, b) }
            }
        }
    }
}
