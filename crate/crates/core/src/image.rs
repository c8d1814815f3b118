//! Grayscale images and the Netpbm PGM codec (P2 ASCII and P5 binary).

use std::fmt;
use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("malformed PGM header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    #[error("maxval {maxval} at byte {offset} is outside 1..=255")]
    MaxvalOutOfRange { offset: usize, maxval: u64 },
    #[error("truncated pixel data at byte {offset}: expected {expected} samples, found {found}")]
    TruncatedData {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: u64,
        maxval: u64,
    },
    #[error("invalid image: {0}")]
    Invalid(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Row-major grayscale raster with a declared bit depth of 1..=8.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    bit_depth: u8,
    pixels: Vec<u8>,
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("bit_depth", &self.bit_depth)
            .field("pixels", &self.pixels.len())
            .finish()
    }
}

impl GrayImage {
    pub fn new(
        width: usize,
        height: usize,
        bit_depth: u8,
        pixels: Vec<u8>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::Invalid(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if !(1..=8).contains(&bit_depth) {
            return Err(ImageError::Invalid(format!(
                "bit depth {bit_depth} outside 1..=8"
            )));
        }
        if pixels.len() != width * height {
            return Err(ImageError::Invalid(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        let max = max_value(bit_depth);
        if let Some(pos) = pixels.iter().position(|&p| u32::from(p) > max) {
            return Err(ImageError::Invalid(format!(
                "pixel {pos} has value {} above {max} for depth {bit_depth}",
                pixels[pos]
            )));
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            pixels,
        })
    }

    /// Image filled with a single value.
    pub fn filled(
        width: usize,
        height: usize,
        bit_depth: u8,
        value: u8,
    ) -> Result<Self, ImageError> {
        Self::new(width, height, bit_depth, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Largest representable intensity, `2^bit_depth - 1`.
    pub fn max_value(&self) -> u32 {
        max_value(self.bit_depth)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Same geometry, new pixel values. Values are validated against `bit_depth`.
    pub fn with_pixels(&self, bit_depth: u8, pixels: Vec<u8>) -> Result<Self, ImageError> {
        Self::new(self.width, self.height, bit_depth, pixels)
    }

    pub fn same_shape(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Parse a P2 or P5 PGM held in memory.
    pub fn from_pgm_bytes(data: &[u8]) -> Result<Self, ImageError> {
        let mut cursor = HeaderCursor { data, pos: 0 };
        let magic_at = cursor.pos;
        let magic = cursor.token()?;
        let binary = match magic.as_slice() {
            b"P5" => true,
            b"P2" => false,
            other => {
                return Err(ImageError::MalformedHeader {
                    offset: magic_at,
                    reason: format!("unsupported magic {:?}", String::from_utf8_lossy(other)),
                })
            }
        };
        let (width, _) = cursor.number("width")?;
        let (height, _) = cursor.number("height")?;
        let (maxval, maxval_at) = cursor.number("maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(ImageError::MaxvalOutOfRange {
                offset: maxval_at,
                maxval,
            });
        }
        if width == 0 || height == 0 {
            return Err(ImageError::MalformedHeader {
                offset: magic_at,
                reason: format!("zero dimension {width}x{height}"),
            });
        }
        let (width, height) = (width as usize, height as usize);
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| ImageError::MalformedHeader {
                offset: magic_at,
                reason: "dimensions overflow".into(),
            })?;

        let pixels = if binary {
            // exactly one whitespace byte separates the header from the raster
            match data.get(cursor.pos) {
                Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
                _ => {
                    return Err(ImageError::MalformedHeader {
                        offset: cursor.pos,
                        reason: "missing whitespace before raster".into(),
                    })
                }
            }
            let start = cursor.pos;
            let raster = &data[start..];
            if raster.len() < expected {
                return Err(ImageError::TruncatedData {
                    offset: data.len(),
                    expected,
                    found: raster.len(),
                });
            }
            let raster = &raster[..expected];
            if let Some(i) = raster.iter().position(|&v| u64::from(v) > maxval) {
                return Err(ImageError::SampleOutOfRange {
                    offset: start + i,
                    value: u64::from(raster[i]),
                    maxval,
                });
            }
            raster.to_vec()
        } else {
            let mut pixels = Vec::with_capacity(expected);
            while pixels.len() < expected {
                if cursor.at_end() {
                    return Err(ImageError::TruncatedData {
                        offset: data.len(),
                        expected,
                        found: pixels.len(),
                    });
                }
                let (v, at) = cursor.number("sample")?;
                if v > maxval {
                    return Err(ImageError::SampleOutOfRange {
                        offset: at,
                        value: v,
                        maxval,
                    });
                }
                pixels.push(v as u8);
            }
            pixels
        };

        let bit_depth = depth_for_maxval(maxval as u32);
        Self::new(width, height, bit_depth, pixels)
    }

    /// Binary (P5) encoding with maxval `2^bit_depth - 1`.
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out =
            format!("P5\n{} {}\n{}\n", self.width, self.height, self.max_value()).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// ASCII (P2) encoding, one image row per line.
    pub fn to_pgm_ascii(&self) -> String {
        let mut out = format!("P2\n{} {}\n{}\n", self.width, self.height, self.max_value());
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

pub fn max_value(bit_depth: u8) -> u32 {
    (1u32 << bit_depth) - 1
}

/// Smallest depth `q` with `maxval < 2^q`.
pub fn depth_for_maxval(maxval: u32) -> u8 {
    (32 - maxval.leading_zeros()).max(1) as u8
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    let data = fs::read(path)?;
    GrayImage::from_pgm_bytes(&data)
}

pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<(), ImageError> {
    fs::write(path, img.to_pgm_bytes())?;
    Ok(())
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_space_and_comments();
        self.pos >= self.data.len()
    }

    fn token(&mut self) -> Result<Vec<u8>, ImageError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedHeader {
                offset: start,
                reason: "unexpected end of input".into(),
            });
        }
        Ok(self.data[start..self.pos].to_vec())
    }

    fn number(&mut self, what: &str) -> Result<(u64, usize), ImageError> {
        self.skip_space_and_comments();
        let at = self.pos;
        let tok = self.token()?;
        let text = std::str::from_utf8(&tok).ok();
        text.and_then(|t| t.parse::<u64>().ok())
            .map(|v| (v, at))
            .ok_or_else(|| ImageError::MalformedHeader {
                offset: at,
                reason: format!("expected {what}, found {:?}", String::from_utf8_lossy(&tok)),
            })
    }
}
