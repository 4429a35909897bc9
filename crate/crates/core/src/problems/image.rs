use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::Vector;

/// Grayscale image with row-major pixels in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    pub height: usize,
    pub width: usize,
    pub pixels: Vector,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vector) -> Result<Self> {
        crate::error::check_len(height * width, pixels.len())?;
        Ok(GrayImage { height, width, pixels })
    }
}

fn header_tokens(data: &[u8], count: usize) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < count {
        while i < data.len() && data[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < data.len() && data[i] == b'#' {
            while i < data.len() && data[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        while i < data.len() && !data[i].is_ascii_whitespace() && data[i] != b'#' {
            i += 1;
        }
        if start == i {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        tokens.push(String::from_utf8_lossy(&data[start..i]).into_owned());
    }
    // exactly one whitespace byte separates the header from the raster
    Ok((tokens, i + 1))
}

/// Parses a binary 8-bit PGM (`P5`); pixel values are divided by 255.
pub fn parse_pgm(data: &[u8]) -> Result<GrayImage> {
    let (tokens, start) = header_tokens(data, 4)?;
    if tokens[0] != "P5" {
        return Err(Error::Parse(format!("expected P5 magic, found {:?}", tokens[0])));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse(format!("bad PGM header field {s:?}")));
    let (width, height, maxval) = (num(&tokens[1])?, num(&tokens[2])?, num(&tokens[3])?);
    if maxval != 255 {
        return Err(Error::Parse(format!("only 8-bit PGM with maxval 255 is supported, got {maxval}")));
    }
    let n = width * height;
    let raster = data.get(start..start + n).ok_or_else(|| Error::Parse("truncated PGM raster".into()))?;
    GrayImage::new(height, width, Vector::from_iterator(n, raster.iter().map(|&p| p as f64 / 255.0)))
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend(image.pixels.iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    parse_pgm(&data)
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    std::fs::File::create(path)?.write_all(&encode_pgm(image))?;
    Ok(())
}

/// Alternating 0/1 squares of side `cell`.
pub fn checkerboard(height: usize, width: usize, cell: usize) -> Vector {
    let cell = cell.max(1);
    Vector::from_iterator(
        height * width,
        (0..height * width).map(|k| (((k / width) / cell + (k % width) / cell) % 2) as f64),
    )
}

/// Horizontal ramp from 0 at the left edge to 1 at the right edge.
pub fn ramp(height: usize, width: usize) -> Vector {
    let den = width.saturating_sub(1).max(1) as f64;
    Vector::from_iterator(height * width, (0..height * width).map(|k| (k % width) as f64 / den))
}

/// Test-chart-like pattern: a gray background, a bright disk, a dark
/// rectangle and vertical bars of increasing frequency along the bottom.
pub fn chart(height: usize, width: usize) -> Vector {
    let (h, w) = (height as f64, width as f64);
    let mut img = Vector::from_element(height * width, 0.5);
    for r in 0..height {
        for c in 0..width {
            let (y, x) = (r as f64 / h, c as f64 / w);
            let v = &mut img[r * width + c];
            if (x - 0.3).powi(2) + (y - 0.3).powi(2) < 0.04 {
                *v = 0.9;
            }
            if (0.55..0.85).contains(&x) && (0.15..0.45).contains(&y) {
                *v = 0.1;
            }
            if y >= 0.6 {
                let period = 2 + (c * 6 / width.max(1)).min(5);
                *v = if (c / period).is_multiple_of(2) { 0.8 } else { 0.2 };
                if y >= 0.9 {
                    *v = x;
                }
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::new(3, 4, Vector::from_fn(12, |i, _| i as f64 / 11.0)).unwrap();
        let bytes = encode_pgm(&img);
        let back = parse_pgm(&bytes).unwrap();
        assert_eq!((back.height, back.width), (3, 4));
        assert!((back.pixels - img.pixels).amax() <= 0.5 / 255.0);
        let again = parse_pgm(&encode_pgm(&parse_pgm(&bytes).unwrap())).unwrap();
        assert_eq!(again, parse_pgm(&bytes).unwrap());
    }

    #[test]
    fn pgm_header_with_comment() {
        let mut data = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        data.extend([0u8, 255]);
        let img = parse_pgm(&data).unwrap();
        assert_eq!(img.pixels, Vector::from_row_slice(&[0.0, 1.0]));
        assert!(parse_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(parse_pgm(b"P5\n2 2\n255\n\x00").is_err());
    }

    #[test]
    fn synthetic_images_in_range() {
        for img in [checkerboard(16, 20, 4), ramp(16, 20), chart(32, 32)] {
            assert!(img.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        assert_eq!(ramp(2, 3), Vector::from_row_slice(&[0.0, 0.5, 1.0, 0.0, 0.5, 1.0]));
        assert_eq!(checkerboard(2, 2, 1), Vector::from_row_slice(&[0.0, 1.0, 1.0, 0.0]));
    }
}
