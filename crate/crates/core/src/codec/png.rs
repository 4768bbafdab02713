//! 8-bit gray/RGB PNG support on top of the `png` crate.

use std::io::Cursor;

use png::{BitDepth, ColorType, Decoder, Encoder, Transformations};

use crate::error::{Error, Result};

pub(crate) const SIGNATURE: &[u8] = &[0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

pub(crate) struct Decoded {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub samples: Vec<u8>,
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Decoded> {
    let mut decoder = Decoder::new(Cursor::new(bytes));
    // Palette images become RGB; sub-byte gray becomes 8-bit gray.
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(decoding_error)?;
    let (color, depth) = reader.output_color_type();
    if depth != BitDepth::Eight {
        return Err(Error::unsupported(format!("PNG bit depth {depth:?}")));
    }
    let channels = match color {
        ColorType::Grayscale => 1,
        ColorType::Rgb => 3,
        other => return Err(Error::unsupported(format!("PNG color type {other:?}"))),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::malformed("PNG dimensions too large"))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(decoding_error)?;
    let (width, height) = (info.width as usize, info.height as usize);
    let row = width * channels;
    // Drop any per-row padding the decoder may report.
    let samples = if info.line_size == row {
        buf.truncate(row * height);
        buf
    } else {
        buf.chunks(info.line_size)
            .take(height)
            .flat_map(|r| r[..row].iter().copied())
            .collect()
    };
    Ok(Decoded {
        width,
        height,
        channels,
        samples,
    })
}

pub(crate) fn encode(width: usize, height: usize, channels: usize, samples: &[u8]) -> Result<Vec<u8>> {
    let (w, h) = (
        u32::try_from(width).map_err(|_| Error::unsupported("PNG width exceeds u32"))?,
        u32::try_from(height).map_err(|_| Error::unsupported("PNG height exceeds u32"))?,
    );
    let mut out = Vec::new();
    {
        let mut encoder = Encoder::new(&mut out, w, h);
        encoder.set_color(if channels == 1 {
            ColorType::Grayscale
        } else {
            ColorType::Rgb
        });
        encoder.set_depth(BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(encoding_error)?;
        writer.write_image_data(samples).map_err(encoding_error)?;
        writer.finish().map_err(encoding_error)?;
    }
    Ok(out)
}

fn decoding_error(e: png::DecodingError) -> Error {
    match e {
        png::DecodingError::IoError(io) => Error::malformed(format!("truncated PNG: {io}")),
        png::DecodingError::Format(f) => Error::malformed(format!("invalid PNG: {f}")),
        png::DecodingError::Parameter(p) => Error::malformed(format!("PNG parameter: {p}")),
        png::DecodingError::LimitsExceeded => Error::unsupported("PNG exceeds decoder limits"),
    }
}

fn encoding_error(e: png::EncodingError) -> Error {
    match e {
        png::EncodingError::IoError(io) => Error::Io(io),
        other => Error::unsupported(format!("PNG encoding: {other}")),
    }
}
