//! Image decoding and encoding.
//!
//! Netpbm (PGM/PPM, maxval 255) is the native, bit-exact interchange format.
//! 8-bit gray and RGB PNG are supported for convenience. Gray inputs decode to
//! RGB as `(v, v, v)` triplets; masks encode as 0 (unset) and 255 (set).

mod netpbm;
mod png;

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{BinaryMask, GrayImage, RgbImage};

use netpbm::Magic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    /// P2
    PlainPgm,
    /// P3
    PlainPpm,
    /// P5
    Pgm,
    /// P6
    Ppm,
    Png,
}

impl ImageFormat {
    /// Identifies the format from the leading bytes of a stream.
    pub fn sniff(bytes: &[u8]) -> Option<Self> {
        if bytes.starts_with(png::SIGNATURE) {
            return Some(ImageFormat::Png);
        }
        netpbm::sniff(bytes).map(Self::from_magic)
    }

    /// Guesses the format from a file extension. Netpbm extensions map to the
    /// raw (binary) variants.
    pub fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(ImageFormat::Pgm),
            "ppm" | "pnm" => Some(ImageFormat::Ppm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::PlainPgm | ImageFormat::Pgm => "pgm",
            ImageFormat::PlainPpm | ImageFormat::Ppm => "ppm",
            ImageFormat::Png => "png",
        }
    }

    fn from_magic(m: Magic) -> Self {
        match m {
            Magic::PlainGray => ImageFormat::PlainPgm,
            Magic::PlainColor => ImageFormat::PlainPpm,
            Magic::RawGray => ImageFormat::Pgm,
            Magic::RawColor => ImageFormat::Ppm,
        }
    }

    fn netpbm_magic(self) -> Option<Magic> {
        match self {
            ImageFormat::PlainPgm => Some(Magic::PlainGray),
            ImageFormat::PlainPpm => Some(Magic::PlainColor),
            ImageFormat::Pgm => Some(Magic::RawGray),
            ImageFormat::Ppm => Some(Magic::RawColor),
            ImageFormat::Png => None,
        }
    }
}

/// Any of the image kinds the encoder accepts.
#[derive(Clone, Copy, Debug)]
pub enum ImageRef<'a> {
    Rgb(&'a RgbImage),
    Gray(&'a GrayImage),
    Mask(&'a BinaryMask),
}

impl<'a> From<&'a RgbImage> for ImageRef<'a> {
    fn from(img: &'a RgbImage) -> Self {
        ImageRef::Rgb(img)
    }
}

impl<'a> From<&'a GrayImage> for ImageRef<'a> {
    fn from(img: &'a GrayImage) -> Self {
        ImageRef::Gray(img)
    }
}

impl<'a> From<&'a BinaryMask> for ImageRef<'a> {
    fn from(mask: &'a BinaryMask) -> Self {
        ImageRef::Mask(mask)
    }
}

/// Raw decoded samples before conversion to one of the image types.
struct Samples {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

fn decode_samples(bytes: &[u8], hint: Option<ImageFormat>) -> Result<Samples> {
    let sniffed = ImageFormat::sniff(bytes);
    let format = match (sniffed, hint) {
        (Some(found), Some(expected)) if found != expected => {
            return Err(Error::malformed(format!(
                "expected {expected:?} data, stream looks like {found:?}"
            )))
        }
        (Some(found), _) => found,
        (None, _) if netpbm::looks_like_netpbm(bytes) => ImageFormat::Ppm,
        (None, _) => return Err(Error::unsupported("unrecognized image signature")),
    };
    if format == ImageFormat::Png {
        let d = png::decode(bytes)?;
        return Ok(Samples {
            width: d.width,
            height: d.height,
            channels: d.channels,
            data: d.samples,
        });
    }
    let r = netpbm::decode(bytes)?;
    Ok(Samples {
        width: r.width,
        height: r.height,
        channels: r.channels(),
        data: r.samples,
    })
}

/// Decodes a PPM, PGM or PNG stream into an RGB image.
///
/// If `hint` is given the stream must actually be in that format.
pub fn decode_image(bytes: &[u8], hint: Option<ImageFormat>) -> Result<RgbImage> {
    let s = decode_samples(bytes, hint)?;
    let pixels = match s.channels {
        1 => s.data.iter().map(|&v| [v, v, v]).collect(),
        _ => s.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
    };
    RgbImage::from_pixels(s.width, s.height, pixels)
        .map_err(|e| Error::malformed(e.to_string()))
}

/// Decodes a single-channel stream (PGM or gray PNG).
pub fn decode_gray(bytes: &[u8]) -> Result<GrayImage> {
    let s = decode_samples(bytes, None)?;
    if s.channels != 1 {
        return Err(Error::unsupported("expected a single-channel image"));
    }
    GrayImage::from_pixels(s.width, s.height, s.data).map_err(|e| Error::malformed(e.to_string()))
}

/// Decodes a mask written by [`encode_image`]: every sample must be 0 or 255.
pub fn decode_mask(bytes: &[u8]) -> Result<BinaryMask> {
    let gray = decode_gray(bytes)?;
    let bits = gray
        .pixels()
        .iter()
        .map(|&v| match v {
            0 => Ok(false),
            255 => Ok(true),
            other => Err(Error::malformed(format!("mask sample {other} is neither 0 nor 255"))),
        })
        .collect::<Result<Vec<_>>>()?;
    BinaryMask::from_bits(gray.width(), gray.height(), bits)
}

pub fn encode_image<'a>(image: impl Into<ImageRef<'a>>, format: ImageFormat) -> Result<Vec<u8>> {
    let (width, height, channels, data): (usize, usize, usize, Vec<u8>) = match image.into() {
        ImageRef::Rgb(img) => (
            img.width(),
            img.height(),
            3,
            img.pixels().iter().flatten().copied().collect(),
        ),
        ImageRef::Gray(img) => (img.width(), img.height(), 1, img.pixels().to_vec()),
        ImageRef::Mask(mask) => {
            let g = mask.to_gray();
            (g.width(), g.height(), 1, g.into_pixels())
        }
    };
    match format.netpbm_magic() {
        None => png::encode(width, height, channels, &data),
        Some(magic @ (Magic::PlainGray | Magic::RawGray)) => {
            if channels != 1 {
                return Err(Error::unsupported("an RGB image cannot be stored as PGM"));
            }
            Ok(netpbm::encode(magic, width, height, &data))
        }
        Some(magic) => {
            let rgb: Vec<u8> = if channels == 1 {
                data.iter().flat_map(|&v| [v, v, v]).collect()
            } else {
                data
            };
            Ok(netpbm::encode(magic, width, height, &rgb))
        }
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let bytes = std::fs::read(path)?;
    decode_image(&bytes, None)
}

/// Writes `image` to `path` in `format`.
pub fn write_image<'a>(path: impl AsRef<Path>, image: impl Into<ImageRef<'a>>, format: ImageFormat) -> Result<()> {
    let bytes = encode_image(image, format)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn plain_ppm_grammar() {
        let img = decode_image(b"P3 2 1 255 0 0 0 255 255 255", None).unwrap();
        assert_eq!(img.dimensions(), (2, 1));
        assert_eq!(img.pixels(), &[[0, 0, 0], [255, 255, 255]]);
    }

    #[test]
    fn short_payload_is_malformed() {
        let mut data = b"P6\n4 4\n255\n".to_vec();
        data.extend_from_slice(&[0u8; 30]);
        assert!(matches!(decode_image(&data, None), Err(Error::MalformedImage(_))));
    }

    #[test]
    fn plain_pgm_bytes() {
        let g = GrayImage::from_pixels(1, 1, vec![128]).unwrap();
        let out = encode_image(&g, ImageFormat::PlainPgm).unwrap();
        assert_eq!(out, b"P2\n1 1\n255\n128\n");
    }

    #[test]
    fn mask_payload_is_0_or_255() {
        let m = BinaryMask::from_bits(2, 1, vec![true, false]).unwrap();
        let out = encode_image(&m, ImageFormat::Pgm).unwrap();
        assert!(out.ends_with(&[255, 0]));
        assert_eq!(decode_mask(&out).unwrap(), m);
    }

    #[test]
    fn pgm_promotes_to_gray_triplets() {
        let img = decode_image(b"P2 2 1 255 3 200", None).unwrap();
        assert_eq!(img.pixels(), &[[3, 3, 3], [200, 200, 200]]);
    }

    #[test]
    fn rgb_cannot_be_pgm() {
        let img = RgbImage::filled(1, 1, [1, 2, 3]).unwrap();
        assert!(matches!(
            encode_image(&img, ImageFormat::Pgm),
            Err(Error::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn hint_mismatch_and_unknown_signature() {
        let data = b"P2 1 1 255 0";
        assert!(decode_image(data, Some(ImageFormat::PlainPgm)).is_ok());
        assert!(decode_image(data, Some(ImageFormat::Ppm)).is_err());
        assert!(matches!(decode_image(b"GIF89a", None), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn truncated_png_is_malformed() {
        let img = RgbImage::filled(4, 4, [10, 20, 30]).unwrap();
        let bytes = encode_image(&img, ImageFormat::Png).unwrap();
        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(decode_image(cut, None), Err(Error::MalformedImage(_))));
    }

    #[test]
    fn extension_mapping() {
        assert_eq!(ImageFormat::from_extension(Path::new("a/b.PGM")), Some(ImageFormat::Pgm));
        assert_eq!(ImageFormat::from_extension(Path::new("x.png")), Some(ImageFormat::Png));
        assert_eq!(ImageFormat::from_extension(Path::new("x.jpg")), None);
    }

    fn rgb_image() -> impl Strategy<Value = RgbImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            prop::collection::vec(any::<[u8; 3]>(), w * h)
                .prop_map(move |px| RgbImage::from_pixels(w, h, px).unwrap())
        })
    }

    fn gray_image() -> impl Strategy<Value = GrayImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            prop::collection::vec(any::<u8>(), w * h)
                .prop_map(move |px| GrayImage::from_pixels(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rgb_round_trips(img in rgb_image()) {
            for f in [ImageFormat::Ppm, ImageFormat::PlainPpm, ImageFormat::Png] {
                let bytes = encode_image(&img, f).unwrap();
                prop_assert_eq!(&decode_image(&bytes, Some(f)).unwrap(), &img);
            }
        }

        #[test]
        fn gray_round_trips(img in gray_image()) {
            for f in [ImageFormat::Pgm, ImageFormat::PlainPgm, ImageFormat::Png] {
                let bytes = encode_image(&img, f).unwrap();
                prop_assert_eq!(&decode_gray(&bytes).unwrap(), &img);
            }
        }
    }
}
