//! Uncompressed 24-bit true-color TGA frame buffer.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

pub const TGA_BITS_PER_PIXEL: u8 = 24;
pub const TGA_TRUE_COLOR: u8 = 2;
pub const TGA_HEADER_LEN: usize = 18;
/// Image descriptor with the top-left origin bit set.
const DESCRIPTOR_TOP_LEFT: u8 = 0x20;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("only 24-bit type-2 TGA supported")]
    Unsupported,
    #[error("image dimensions {rows}x{cols} out of range")]
    BadDimensions { rows: usize, cols: usize },
    #[error("pixel ({col}, {row}) outside {cols}x{rows} image")]
    OutOfBounds { col: usize, row: usize, cols: usize, rows: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major pixel grid; each pixel stored as `[blue, green, red]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TgaImage {
    rows: usize,
    cols: usize,
    pixels: Vec<[u8; 3]>,
}

impl TgaImage {
    /// Constructor mirroring the classic `TGA(bitmap, type, rows, cols)`.
    pub fn new(bitmap: u8, image_type: u8, rows: usize, cols: usize) -> Result<TgaImage, ImageError> {
        if bitmap != TGA_BITS_PER_PIXEL || image_type != TGA_TRUE_COLOR {
            return Err(ImageError::Unsupported);
        }
        let max = u16::MAX as usize;
        if rows == 0 || cols == 0 || rows > max || cols > max {
            return Err(ImageError::BadDimensions { rows, cols });
        }
        Ok(TgaImage {
            rows,
            cols,
            pixels: vec![[0; 3]; rows * cols],
        })
    }

    /// Black image `width` pixels across and `height` down.
    pub fn with_size(width: usize, height: usize) -> Result<TgaImage, ImageError> {
        TgaImage::new(TGA_BITS_PER_PIXEL, TGA_TRUE_COLOR, height, width)
    }

    pub fn width(&self) -> usize {
        self.cols
    }

    pub fn height(&self) -> usize {
        self.rows
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    fn index(&self, col: usize, row: usize) -> Result<usize, ImageError> {
        if col >= self.cols || row >= self.rows {
            return Err(ImageError::OutOfBounds {
                col,
                row,
                cols: self.cols,
                rows: self.rows,
            });
        }
        Ok(row * self.cols + col)
    }

    pub fn set_pixel(&mut self, col: usize, row: usize, r: u8, g: u8, b: u8) -> Result<(), ImageError> {
        let i = self.index(col, row)?;
        self.pixels[i] = [b, g, r];
        Ok(())
    }

    /// `(r, g, b)` at the given position.
    pub fn pixel(&self, col: usize, row: usize) -> Result<(u8, u8, u8), ImageError> {
        let [b, g, r] = self.pixels[self.index(col, row)?];
        Ok((r, g, b))
    }

    /// Mutable BGR rows, top row first. Rows are disjoint so they can be
    /// filled by independent workers.
    pub fn rows_mut(&mut self) -> std::slice::ChunksExactMut<'_, [u8; 3]> {
        self.pixels.chunks_exact_mut(self.cols)
    }

    #[cfg(feature = "parallel")]
    pub(crate) fn par_rows_mut(&mut self) -> rayon::slice::ChunksExactMut<'_, [u8; 3]> {
        use rayon::slice::ParallelSliceMut;
        self.pixels.par_chunks_exact_mut(self.cols)
    }

    /// Top-to-bottom RGBA bytes, handy for canvas-style consumers.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|&[b, g, r]| [r, g, b, 255]).collect()
    }

    pub fn encoded_len(&self) -> usize {
        TGA_HEADER_LEN + 3 * self.pixels.len()
    }

    /// Serialized TGA file: 18-byte header, then BGR pixels, top row first.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&[0, 0, TGA_TRUE_COLOR]);
        // color map spec (unused) and x/y origin
        out.extend_from_slice(&[0; 9]);
        out.extend_from_slice(&(self.cols as u16).to_le_bytes());
        out.extend_from_slice(&(self.rows as u16).to_le_bytes());
        out.push(TGA_BITS_PER_PIXEL);
        out.push(DESCRIPTOR_TOP_LEFT);
        for px in &self.pixels {
            out.extend_from_slice(px);
        }
        out
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<(), ImageError> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        file.write_all(&self.encode())?;
        file.flush()?;
        Ok(())
    }
}

pub fn new_image(bitmap: u8, image_type: u8, rows: usize, cols: usize) -> Result<TgaImage, ImageError> {
    TgaImage::new(bitmap, image_type, rows, cols)
}

pub fn encode_tga(image: &TgaImage) -> Vec<u8> {
    image.encode()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Minimal reader for the subset we write.
    fn decode(bytes: &[u8]) -> TgaImage {
        assert_eq!(&bytes[..3], &[0, 0, 2]);
        assert_eq!(bytes[16], 24);
        assert_eq!(bytes[17], 0x20);
        let cols = u16::from_le_bytes([bytes[12], bytes[13]]) as usize;
        let rows = u16::from_le_bytes([bytes[14], bytes[15]]) as usize;
        let pixels = bytes[18..].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect::<Vec<_>>();
        assert_eq!(pixels.len(), rows * cols);
        TgaImage { rows, cols, pixels }
    }

    #[test]
    fn constructor_sizes() {
        assert_eq!(new_image(24, 2, 1024, 768).unwrap().pixel_count(), 786_432);
        let one = new_image(24, 2, 1, 1).unwrap();
        assert_eq!(one.pixel(0, 0).unwrap(), (0, 0, 0));
        let err = new_image(32, 2, 10, 10).unwrap_err();
        assert_eq!(err.to_string(), "only 24-bit type-2 TGA supported");
        assert!(matches!(new_image(24, 10, 10, 10), Err(ImageError::Unsupported)));
        assert!(matches!(new_image(24, 2, 0, 10), Err(ImageError::BadDimensions { .. })));
        assert!(matches!(new_image(24, 2, 70_000, 1), Err(ImageError::BadDimensions { .. })));
    }

    #[test]
    fn set_pixel_round_trip_and_bounds() {
        let mut img = TgaImage::with_size(4, 3).unwrap();
        img.set_pixel(0, 0, 255, 0, 0).unwrap();
        assert_eq!(img.pixel(0, 0).unwrap(), (255, 0, 0));
        img.set_pixel(3, 2, 1, 2, 3).unwrap();
        img.set_pixel(3, 2, 9, 8, 7).unwrap();
        assert_eq!(img.pixel(3, 2).unwrap(), (9, 8, 7));
        // stored blue-green-red at row * cols + col
        assert_eq!(img.pixels[2 * 4 + 3], [7, 8, 9]);
        assert!(matches!(img.set_pixel(4, 0, 0, 0, 0), Err(ImageError::OutOfBounds { .. })));
        assert!(img.set_pixel(0, 3, 0, 0, 0).is_err());
    }

    #[test]
    fn one_white_pixel_bytes() {
        let mut img = TgaImage::with_size(1, 1).unwrap();
        img.set_pixel(0, 0, 255, 255, 255).unwrap();
        assert_eq!(
            encode_tga(&img),
            vec![0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 24, 32, 255, 255, 255]
        );
    }

    #[test]
    fn header_dimensions_little_endian() {
        let img = TgaImage::with_size(1024, 768).unwrap();
        let bytes = img.encode();
        assert_eq!(bytes.len(), 2_359_314);
        assert_eq!(&bytes[12..16], &[0x00, 0x04, 0x00, 0x03]);
    }

    #[test]
    fn rgba_export() {
        let mut img = TgaImage::with_size(2, 1).unwrap();
        img.set_pixel(1, 0, 10, 20, 30).unwrap();
        assert_eq!(img.to_rgba(), vec![0, 0, 0, 255, 10, 20, 30, 255]);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
            let mut img = TgaImage::with_size(w, h).unwrap();
            let mut x = seed;
            for row in 0..h {
                for col in 0..w {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let [r, g, b, ..] = x.to_le_bytes();
                    img.set_pixel(col, row, r, g, b).unwrap();
                }
            }
            let bytes = img.encode();
            prop_assert_eq!(bytes.len(), 18 + 3 * w * h);
            prop_assert_eq!(&bytes, &img.clone().encode());
            prop_assert_eq!(decode(&bytes), img);
        }
    }
}
