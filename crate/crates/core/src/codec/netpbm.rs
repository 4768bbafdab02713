//! Netpbm PGM/PPM reader and writer, plain (P2/P3) and raw (P5/P6), maxval 255.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Magic {
    PlainGray,
    PlainColor,
    RawGray,
    RawColor,
}

impl Magic {
    fn from_bytes(b: &[u8]) -> Option<Self> {
        match b {
            b"P2" => Some(Magic::PlainGray),
            b"P3" => Some(Magic::PlainColor),
            b"P5" => Some(Magic::RawGray),
            b"P6" => Some(Magic::RawColor),
            _ => None,
        }
    }

    fn channels(self) -> usize {
        match self {
            Magic::PlainGray | Magic::RawGray => 1,
            Magic::PlainColor | Magic::RawColor => 3,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Magic::PlainGray => "P2",
            Magic::PlainColor => "P3",
            Magic::RawGray => "P5",
            Magic::RawColor => "P6",
        }
    }
}

/// A decoded Netpbm raster: interleaved samples with 1 or 3 channels.
pub(crate) struct Raster {
    pub magic: Magic,
    pub width: usize,
    pub height: usize,
    pub samples: Vec<u8>,
}

impl Raster {
    pub fn channels(&self) -> usize {
        self.magic.channels()
    }
}

/// Returns the magic if `bytes` starts with a supported Netpbm signature.
pub(crate) fn sniff(bytes: &[u8]) -> Option<Magic> {
    bytes.get(..2).and_then(Magic::from_bytes)
}

/// True if the stream looks like any Netpbm variant, including ones we reject.
pub(crate) fn looks_like_netpbm(bytes: &[u8]) -> bool {
    matches!(bytes, [b'P', b'1'..=b'7', ..])
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.data.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.data.get(self.pos) {
                None => Error::malformed(format!("unexpected end of data reading {what}")),
                Some(&c) => Error::malformed(format!(
                    "expected a decimal number for {what}, found byte 0x{c:02x}"
                )),
            });
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::malformed(format!("{what} out of range")))
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<Raster> {
    let magic = match sniff(bytes) {
        Some(m) => m,
        None if looks_like_netpbm(bytes) => {
            return Err(Error::unsupported(format!(
                "Netpbm variant {} is not supported",
                String::from_utf8_lossy(&bytes[..2])
            )))
        }
        None => return Err(Error::malformed("missing Netpbm magic number")),
    };
    let mut cur = Cursor { data: bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::malformed(format!("empty raster {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::unsupported(format!("maxval {maxval} (only 255 is supported)")));
    }
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(magic.channels()))
        .ok_or_else(|| Error::malformed("raster size overflows"))?;

    let samples = match magic {
        Magic::RawGray | Magic::RawColor => {
            // Exactly one whitespace byte separates the header from the payload.
            match bytes.get(cur.pos) {
                Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::malformed("missing whitespace after maxval")),
            }
            let payload = &bytes[cur.pos..];
            if payload.len() < expected {
                return Err(Error::malformed(format!(
                    "payload holds {} samples, header promises {expected}",
                    payload.len()
                )));
            }
            payload[..expected].to_vec()
        }
        Magic::PlainGray | Magic::PlainColor => {
            let mut samples = Vec::with_capacity(expected);
            for i in 0..expected {
                let v = cur.number("sample").map_err(|e| match e {
                    Error::MalformedImage(msg) if cur.pos >= bytes.len() => Error::malformed(
                        format!("payload holds {i} samples, header promises {expected} ({msg})"),
                    ),
                    other => other,
                })?;
                if v > maxval {
                    return Err(Error::malformed(format!("sample {v} exceeds maxval {maxval}")));
                }
                samples.push(v as u8);
            }
            samples
        }
    };

    Ok(Raster {
        magic,
        width,
        height,
        samples,
    })
}

const PLAIN_LINE_LIMIT: usize = 70;

pub(crate) fn encode(magic: Magic, width: usize, height: usize, samples: &[u8]) -> Vec<u8> {
    debug_assert_eq!(samples.len(), width * height * magic.channels());
    let mut out = format!("{}\n{width} {height}\n255\n", magic.tag()).into_bytes();
    match magic {
        Magic::RawGray | Magic::RawColor => out.extend_from_slice(samples),
        Magic::PlainGray | Magic::PlainColor => {
            let row_len = width * magic.channels();
            for row in samples.chunks(row_len) {
                let mut line_len = 0;
                for v in row {
                    let token = v.to_string();
                    if line_len > 0 {
                        if line_len + 1 + token.len() > PLAIN_LINE_LIMIT {
                            out.push(b'\n');
                            line_len = 0;
                        } else {
                            out.push(b' ');
                            line_len += 1;
                        }
                    }
                    out.extend_from_slice(token.as_bytes());
                    line_len += token.len();
                }
                out.push(b'\n');
            }
        }
    }
    out
}
