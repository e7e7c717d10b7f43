//! In-memory image planes and the on-disk writers.
//!
//! Color output is binary PPM (P6, 8-bit) after clamping to [0, 1] and
//! gamma-2.2 encoding; PNG goes through the `image` crate. Depth and feature
//! planes are dumped as little-endian f32 with a 16-byte header:
//! magic `RLIT`, then u32 width, height, channels. The payload is planar —
//! channel 0 for every pixel, then channel 1, and so on.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::math::Rgb;

pub const FLOAT_DUMP_MAGIC: [u8; 4] = *b"RLIT";

/// Row-major, channel-interleaved image of f64 samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        Image {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    pub fn from_data(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height * channels, "image payload size");
        Image { width, height, channels, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn pixel_mut(&mut self, x: usize, y: usize) -> &mut [f64] {
        let i = (y * self.width + x) * self.channels;
        &mut self.data[i..i + self.channels]
    }

    pub fn rgb_at(&self, x: usize, y: usize) -> Rgb {
        let p = self.pixel(x, y);
        Rgb::new(p[0], p[1], p[2])
    }

    pub fn set_rgb(&mut self, x: usize, y: usize, c: Rgb) {
        let p = self.pixel_mut(x, y);
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }

    pub fn scalar_at(&self, x: usize, y: usize) -> f64 {
        self.pixel(x, y)[0]
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_value(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            self.data.iter().sum::<f64>() / self.data.len() as f64
        }
    }

    /// Largest absolute per-sample difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        assert_eq!(self.data.len(), other.data.len(), "image shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// True when every sample is bit-identical.
    pub fn bit_equal(&self, other: &Image) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.channels == other.channels
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// Copies `src` into this image with its top-left corner at (x0, y0),
    /// overwriting whatever was there. Channel counts must match.
    pub fn paste(&mut self, src: &Image, x0: usize, y0: usize) {
        assert_eq!(self.channels, src.channels, "paste channel mismatch");
        assert!(x0 + src.width <= self.width && y0 + src.height <= self.height);
        for y in 0..src.height {
            for x in 0..src.width {
                let from = src.pixel(x, y);
                self.pixel_mut(x0 + x, y0 + y).copy_from_slice(from);
            }
        }
    }

    /// Stacks images top-to-bottom. All must share width and channel count.
    pub fn stack_vertical(rows: &[Image]) -> Image {
        assert!(!rows.is_empty());
        let width = rows[0].width;
        let channels = rows[0].channels;
        let height = rows.iter().map(|r| r.height).sum();
        let mut out = Image::new(width, height, channels);
        let mut y = 0;
        for row in rows {
            out.paste(row, 0, y);
            y += row.height;
        }
        out
    }

    /// 8-bit gamma-2.2 quantization of an RGB image.
    pub fn to_rgb8(&self) -> Vec<u8> {
        assert_eq!(self.channels, 3, "RGB encoding needs 3 channels");
        self.data.iter().map(|&v| encode_gamma(v)).collect()
    }
}

fn encode_gamma(v: f64) -> u8 {
    let v = v.clamp(0.0, 1.0).powf(1.0 / 2.2);
    (v * 255.0).round() as u8
}

/// Writes a 3-channel image as binary PPM (P6, 8-bit, gamma 2.2).
pub fn write_ppm(image: &Image, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    write!(f, "P6\n{} {}\n255\n", image.width(), image.height())?;
    f.write_all(&image.to_rgb8())?;
    f.flush()?;
    Ok(())
}

/// Writes a 3-channel image as PNG with the same quantization as the PPM path.
pub fn write_png(image: &Image, path: &Path) -> Result<()> {
    image::save_buffer(
        path,
        &image.to_rgb8(),
        image.width() as u32,
        image.height() as u32,
        image::ColorType::Rgb8,
    )
    .map_err(|e| Error::Image(e.to_string()))
}

/// Picks PPM or PNG from the file extension (default PPM).
pub fn write_color(image: &Image, path: &Path) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("png") => write_png(image, path),
        _ => write_ppm(image, path),
    }
}

/// Writes an f32 planar dump with the 16-byte `RLIT` header.
pub fn write_float_planes(image: &Image, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(&FLOAT_DUMP_MAGIC)?;
    f.write_all(&(image.width() as u32).to_le_bytes())?;
    f.write_all(&(image.height() as u32).to_le_bytes())?;
    f.write_all(&(image.channels() as u32).to_le_bytes())?;
    for c in 0..image.channels() {
        for y in 0..image.height() {
            for x in 0..image.width() {
                f.write_all(&(image.pixel(x, y)[c] as f32).to_le_bytes())?;
            }
        }
    }
    f.flush()?;
    Ok(())
}

/// Reads a dump produced by [`write_float_planes`].
pub fn read_float_planes(path: &Path) -> Result<Image> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::Truncated { section: "float dump header", missing: 16 - bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != FLOAT_DUMP_MAGIC {
        return Err(Error::BadMagic { expected: FLOAT_DUMP_MAGIC, found: magic });
    }
    let dim = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    let (width, height, channels) = (dim(4), dim(8), dim(12));
    let expected = 16 + width * height * channels * 4;
    if bytes.len() < expected {
        return Err(Error::Truncated {
            section: "float dump payload",
            missing: expected - bytes.len(),
        });
    }
    let mut image = Image::new(width, height, channels);
    let mut off = 16;
    for c in 0..channels {
        for y in 0..height {
            for x in 0..width {
                let v = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
                image.pixel_mut(x, y)[c] = v as f64;
                off += 4;
            }
        }
    }
    Ok(image)
}
