//! RGB texture canvas: the image being edited, plus pixel rectangles and
//! content digests.

use std::path::Path;

use crate::error::{Error, Result};

/// Axis-aligned pixel rectangle on the texture plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    /// Containment of a continuous point, half-open on the far edges.
    pub fn contains_point(&self, px: f64, py: f64) -> bool {
        px >= self.x as f64
            && px < (self.x + self.w) as f64
            && py >= self.y as f64
            && py < (self.y + self.h) as f64
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.x + other.w
            && other.x < self.x + self.w
            && self.y < other.y + other.h
            && other.y < self.y + self.h
    }

    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.x.checked_add(self.w).is_some_and(|r| r <= width)
            && self.y.checked_add(self.h).is_some_and(|b| b <= height)
    }
}

/// 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextureCanvas {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl TextureCanvas {
    pub fn new(width: u32, height: u32, fill: [u8; 3]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "texture dimensions must be positive, got {width}x{height}"
            )));
        }
        let mut pixels = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..(width as usize * height as usize) {
            pixels.extend_from_slice(&fill);
        }
        Ok(Self { width, height, pixels })
    }

    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "texture dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "pixel buffer length {} does not match {width}x{height}x3 = {expected}",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Texture area in square pixels (the `A` of the radius rule).
    pub fn area(&self) -> f64 {
        self.width as f64 * self.height as f64
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn in_bounds(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && x < self.width as f64 && y >= 0.0 && y < self.height as f64
    }

    /// Count pixels inside `rect` that differ from `base`. Used by the
    /// synthetic coverage oracle; both canvases must share dimensions.
    pub fn diff_count_in(&self, base: &TextureCanvas, rect: &Rect) -> Result<u64> {
        if self.width != base.width || self.height != base.height {
            return Err(Error::InvalidArgument(format!(
                "canvas dimensions {}x{} do not match base {}x{}",
                self.width, self.height, base.width, base.height
            )));
        }
        if !rect.fits_within(self.width, self.height) {
            return Err(Error::InvalidArgument(format!(
                "rect {rect:?} exceeds {}x{} texture", self.width, self.height
            )));
        }
        let mut differing = 0u64;
        for y in rect.y..rect.y + rect.h {
            let row = (y as usize * self.width as usize + rect.x as usize) * 3;
            let len = rect.w as usize * 3;
            let a = &self.pixels[row..row + len];
            let b = &base.pixels[row..row + len];
            for (pa, pb) in a.chunks_exact(3).zip(b.chunks_exact(3)) {
                if pa != pb {
                    differing += 1;
                }
            }
        }
        Ok(differing)
    }

    /// Stable content digest over dimensions and pixel bytes, hex-encoded.
    /// Keys the fitness cache and pins checkpointed textures.
    pub fn digest(&self) -> String {
        let mut header = [0u8; 8];
        header[..4].copy_from_slice(&self.width.to_le_bytes());
        header[4..].copy_from_slice(&self.height.to_le_bytes());
        let h = seahash::hash(&header) ^ seahash::hash(&self.pixels).rotate_left(1);
        format!("{h:016x}")
    }

    pub fn load_png(path: &Path) -> Result<Self> {
        let img = image::open(path)
            .map_err(|e| Error::ImageDecode { path: path.to_path_buf(), message: e.to_string() })?
            .to_rgb8();
        Self::from_raw(img.width(), img.height(), img.into_raw())
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let img = image::RgbImage::from_raw(self.width, self.height, self.pixels.clone())
            .expect("buffer length is checked at construction");
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::ImageDecode { path: path.to_path_buf(), message: e.to_string() })
    }

    /// PNG bytes in memory, for the inline oracle transfer mode.
    pub fn png_bytes(&self) -> Result<Vec<u8>> {
        let img = image::RgbImage::from_raw(self.width, self.height, self.pixels.clone())
            .expect("buffer length is checked at construction");
        let mut out = std::io::Cursor::new(Vec::new());
        img.write_to(&mut out, image::ImageFormat::Png).map_err(|e| Error::ImageDecode {
            path: "<memory>".into(),
            message: e.to_string(),
        })?;
        Ok(out.into_inner())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dimensions() {
        assert!(TextureCanvas::new(0, 4, [0, 0, 0]).is_err());
        assert!(TextureCanvas::new(4, 0, [0, 0, 0]).is_err());
    }

    #[test]
    fn rejects_mismatched_buffer() {
        assert!(TextureCanvas::from_raw(2, 2, vec![0; 11]).is_err());
        assert!(TextureCanvas::from_raw(2, 2, vec![0; 12]).is_ok());
    }

    #[test]
    fn digest_tracks_content() {
        let a = TextureCanvas::new(8, 8, [10, 20, 30]).unwrap();
        let mut b = a.clone();
        assert_eq!(a.digest(), b.digest());
        b.set_pixel(3, 3, [11, 20, 30]);
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn digest_distinguishes_shape() {
        // Same byte stream, different geometry.
        let a = TextureCanvas::new(4, 2, [5, 5, 5]).unwrap();
        let b = TextureCanvas::new(2, 4, [5, 5, 5]).unwrap();
        assert_ne!(a.digest(), b.digest());
    }

    #[test]
    fn diff_count_sees_region_changes_only() {
        let base = TextureCanvas::new(16, 16, [0, 0, 0]).unwrap();
        let mut edited = base.clone();
        edited.set_pixel(2, 2, [255, 0, 0]);
        edited.set_pixel(3, 2, [255, 0, 0]);
        edited.set_pixel(12, 12, [255, 0, 0]);
        let region = Rect::new(0, 0, 8, 8);
        assert_eq!(edited.diff_count_in(&base, &region).unwrap(), 2);
    }

    #[test]
    fn png_roundtrip_preserves_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.png");
        let mut canvas = TextureCanvas::new(9, 7, [1, 2, 3]).unwrap();
        canvas.set_pixel(4, 4, [200, 100, 50]);
        canvas.save_png(&path).unwrap();
        let back = TextureCanvas::load_png(&path).unwrap();
        assert_eq!(canvas, back);
    }
}
