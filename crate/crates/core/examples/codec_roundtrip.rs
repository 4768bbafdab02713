// Encode an image in every supported format and decode it back.
//
// ```bash
// cargo run --example codec_roundtrip
// ```

use leafscan::{decode_image, encode_image, ImageFormat, RgbImage};

pub fn run_example() -> leafscan::Result<()> {
    let pixels = (0..12u8).map(|i| [i * 20, 255 - i * 20, i * 7]).collect();
    let image = RgbImage::from_pixels(4, 3, pixels)?;

    for format in [ImageFormat::PlainPpm, ImageFormat::Ppm, ImageFormat::Png] {
        let bytes = encode_image(&image, format)?;
        let back = decode_image(&bytes, None)?;
        assert_eq!(back, image);
        println!("{format:?}: {} bytes, round trip ok", bytes.len());
    }

    let plain = encode_image(&image, ImageFormat::PlainPpm)?;
    println!("{}", String::from_utf8_lossy(&plain));
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}
