//! Applies a sticker-filled layout to a texture.
//!
//! Each circle receives one sticker, scaled with a bilinear filter to the
//! circle's largest inscribed square (side `sqrt(2) * r`), rotated about the
//! square center with nearest-neighbor resampling, and written over the
//! canvas. Pixels outside the rotated footprint are untouched; sticker alpha,
//! when present, acts as an opacity mask.

use crate::error::{Error, Result};
use crate::layout::{Circle, Layout, Mask};
use crate::pool::{Sticker, StickerPool};
use crate::texture::{Rect, TextureCanvas};

/// A circle bound to a sticker and a total rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub circle: Circle,
    pub sticker_id: String,
    pub rotation_degrees: f64,
}

/// Largest axis-aligned square inside a circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InscribedSquare {
    pub cx: f64,
    pub cy: f64,
    pub side: f64,
}

pub fn inscribed_square(circle: &Circle) -> InscribedSquare {
    InscribedSquare { cx: circle.cx, cy: circle.cy, side: std::f64::consts::SQRT_2 * circle.r }
}

/// Which side of the object a texture region renders to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Other,
}

impl Side {
    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            "other" => Some(Side::Other),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Other => "other",
        }
    }
}

/// Disjoint labeled rectangles marking left/right areas of the texture
/// plane. Anything not covered counts as `Other`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionMap {
    regions: Vec<(Side, Rect)>,
}

impl RegionMap {
    pub fn new(regions: Vec<(Side, Rect)>) -> Result<Self> {
        for i in 0..regions.len() {
            for j in (i + 1)..regions.len() {
                if regions[i].1.intersects(&regions[j].1) {
                    return Err(Error::InvalidArgument(format!(
                        "region map rectangles {i} and {j} overlap"
                    )));
                }
            }
        }
        Ok(Self { regions })
    }

    pub fn regions(&self) -> &[(Side, Rect)] {
        &self.regions
    }

    pub fn side_of(&self, x: f64, y: f64) -> Side {
        self.regions
            .iter()
            .find(|(_, rect)| rect.contains_point(x, y))
            .map(|(side, _)| *side)
            .unwrap_or(Side::Other)
    }

    /// Base rotation for a sticker centered at the given point: the left
    /// side turns a quarter clockwise (-90), the right side a quarter
    /// counterclockwise (+90), anything else stays upright.
    pub fn orientation_for(&self, x: f64, y: f64) -> f64 {
        match self.side_of(x, y) {
            Side::Left => -90.0,
            Side::Right => 90.0,
            Side::Other => 0.0,
        }
    }
}

/// Angle in degrees to (sin, cos) with the turn count removed, so 360 and 0
/// produce identical samples; quadrant angles snap to exact values since the
/// side-orientation rule works in multiples of 90.
fn rotation_sin_cos(degrees: f64) -> (f64, f64) {
    let norm = degrees.rem_euclid(360.0);
    if norm == 0.0 {
        (0.0, 1.0)
    } else if norm == 90.0 {
        (1.0, 0.0)
    } else if norm == 180.0 {
        (0.0, -1.0)
    } else if norm == 270.0 {
        (-1.0, 0.0)
    } else {
        let rad = norm.to_radians();
        (rad.sin(), rad.cos())
    }
}

/// Bilinear resize of an RGBA raster to `side x side`, pixel centers
/// aligned.
fn scale_rgba(rgba: &[u8], w: u32, h: u32, side: u32) -> Vec<u8> {
    let mut out = vec![0u8; side as usize * side as usize * 4];
    for j in 0..side {
        let fy = ((j as f64 + 0.5) * h as f64 / side as f64 - 0.5).clamp(0.0, h as f64 - 1.0);
        let y0 = fy.floor() as u32;
        let y1 = (y0 + 1).min(h - 1);
        let ty = fy - y0 as f64;
        for i in 0..side {
            let fx = ((i as f64 + 0.5) * w as f64 / side as f64 - 0.5).clamp(0.0, w as f64 - 1.0);
            let x0 = fx.floor() as u32;
            let x1 = (x0 + 1).min(w - 1);
            let tx = fx - x0 as f64;

            let idx = |x: u32, y: u32| (y as usize * w as usize + x as usize) * 4;
            let (p00, p10) = (idx(x0, y0), idx(x1, y0));
            let (p01, p11) = (idx(x0, y1), idx(x1, y1));
            let o = (j as usize * side as usize + i as usize) * 4;
            for c in 0..4 {
                let top = rgba[p00 + c] as f64 * (1.0 - tx) + rgba[p10 + c] as f64 * tx;
                let bot = rgba[p01 + c] as f64 * (1.0 - tx) + rgba[p11 + c] as f64 * tx;
                out[o + c] = (top * (1.0 - ty) + bot * ty + 0.5).floor() as u8;
            }
        }
    }
    out
}

#[inline]
fn blend(dst: [u8; 3], src: [u8; 3], alpha: u8) -> [u8; 3] {
    if alpha == 255 {
        return src;
    }
    if alpha == 0 {
        return dst;
    }
    let a = alpha as u32;
    let na = 255 - a;
    [
        ((src[0] as u32 * a + dst[0] as u32 * na + 127) / 255) as u8,
        ((src[1] as u32 * a + dst[1] as u32 * na + 127) / 255) as u8,
        ((src[2] as u32 * a + dst[2] as u32 * na + 127) / 255) as u8,
    ]
}

pub(crate) fn paste_sticker_into(
    canvas: &mut TextureCanvas,
    placement: &Placement,
    sticker: &Sticker,
) -> Result<()> {
    if placement.sticker_id != sticker.id() {
        return Err(Error::MissingSticker(placement.sticker_id.clone()));
    }
    let circle = &placement.circle;
    if !canvas.in_bounds(circle.cx, circle.cy) {
        return Err(Error::InvalidArgument(format!(
            "placement center ({}, {}) lies outside the {}x{} canvas",
            circle.cx,
            circle.cy,
            canvas.width(),
            canvas.height()
        )));
    }

    let square = inscribed_square(circle);
    let side_px = square.side.round().max(1.0);
    if side_px > 16_384.0 {
        return Err(Error::InvalidArgument(format!(
            "inscribed square side {side_px} px is implausibly large"
        )));
    }
    let side_px = side_px as u32;
    let scaled = scale_rgba(sticker.rgba(), sticker.width(), sticker.height(), side_px);

    let (sin, cos) = rotation_sin_cos(placement.rotation_degrees);
    let half = side_px as f64 / 2.0;
    let reach = half * (sin.abs() + cos.abs()) + 1.0;

    let x_lo = ((circle.cx - reach).floor().max(0.0)) as u32;
    let x_hi = ((circle.cx + reach).ceil().min(canvas.width() as f64 - 1.0)) as u32;
    let y_lo = ((circle.cy - reach).floor().max(0.0)) as u32;
    let y_hi = ((circle.cy + reach).ceil().min(canvas.height() as f64 - 1.0)) as u32;

    for y in y_lo..=y_hi {
        let dy = y as f64 + 0.5 - circle.cy;
        for x in x_lo..=x_hi {
            let dx = x as f64 + 0.5 - circle.cx;
            // Undo the visual-counterclockwise rotation to find the source
            // texel for this destination pixel.
            let u = dx * cos - dy * sin;
            let v = dx * sin + dy * cos;
            let su = (u + half).floor();
            let sv = (v + half).floor();
            if su < 0.0 || su >= side_px as f64 || sv < 0.0 || sv >= side_px as f64 {
                continue;
            }
            let si = (sv as usize * side_px as usize + su as usize) * 4;
            let src = [scaled[si], scaled[si + 1], scaled[si + 2]];
            let alpha = scaled[si + 3];
            canvas.set_pixel(x, y, blend(canvas.pixel(x, y), src, alpha));
        }
    }
    Ok(())
}

/// Paste one sticker; returns a new canvas, the input stays untouched.
pub fn paste_sticker(
    canvas: &TextureCanvas,
    placement: &Placement,
    sticker: &Sticker,
) -> Result<TextureCanvas> {
    let mut out = canvas.clone();
    paste_sticker_into(&mut out, placement, sticker)?;
    Ok(out)
}

/// Sequential paste of every placement over a fresh copy of `base`.
pub fn compose(
    base: &TextureCanvas,
    placements: &[Placement],
    pool: &StickerPool,
) -> Result<TextureCanvas> {
    let mut out = base.clone();
    for placement in placements {
        let sticker = pool.get(&placement.sticker_id)?;
        paste_sticker_into(&mut out, placement, sticker)?;
    }
    Ok(out)
}

const PREVIEW_CIRCLE: [u8; 3] = [224, 64, 48];
const PREVIEW_SQUARE: [u8; 3] = [56, 200, 96];

/// Debug rendering: mask as grayscale background, circle outlines, and
/// inscribed-square outlines (rotated when placements are given).
pub fn render_preview(layout: &Layout, mask: &Mask, placements: &[Placement]) -> TextureCanvas {
    let mut canvas = TextureCanvas::new(mask.width(), mask.height(), [0, 0, 0])
        .expect("mask dimensions are positive by construction");
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.allowed_at(x, y) {
                canvas.set_pixel(x, y, [255, 255, 255]);
            }
        }
    }

    for circle in &layout.circles {
        draw_circle_outline(&mut canvas, circle);
    }
    if placements.is_empty() {
        for circle in &layout.circles {
            draw_square_outline(&mut canvas, circle, 0.0);
        }
    } else {
        for p in placements {
            draw_square_outline(&mut canvas, &p.circle, p.rotation_degrees);
        }
    }
    canvas
}

fn draw_circle_outline(canvas: &mut TextureCanvas, circle: &Circle) {
    let x_lo = ((circle.cx - circle.r - 1.0).floor().max(0.0)) as u32;
    let x_hi = ((circle.cx + circle.r + 1.0).ceil().min(canvas.width() as f64 - 1.0)) as u32;
    let y_lo = ((circle.cy - circle.r - 1.0).floor().max(0.0)) as u32;
    let y_hi = ((circle.cy + circle.r + 1.0).ceil().min(canvas.height() as f64 - 1.0)) as u32;
    for y in y_lo..=y_hi {
        for x in x_lo..=x_hi {
            let dx = x as f64 - circle.cx;
            let dy = y as f64 - circle.cy;
            if (dx * dx + dy * dy).sqrt() - circle.r < 0.5 && (dx * dx + dy * dy).sqrt() - circle.r >= -0.5 {
                canvas.set_pixel(x, y, PREVIEW_CIRCLE);
            }
        }
    }
}

fn draw_square_outline(canvas: &mut TextureCanvas, circle: &Circle, rotation_degrees: f64) {
    let square = inscribed_square(circle);
    let half = square.side / 2.0;
    let (sin, cos) = rotation_sin_cos(rotation_degrees);
    let reach = half * (sin.abs() + cos.abs()) + 1.0;
    let x_lo = ((circle.cx - reach).floor().max(0.0)) as u32;
    let x_hi = ((circle.cx + reach).ceil().min(canvas.width() as f64 - 1.0)) as u32;
    let y_lo = ((circle.cy - reach).floor().max(0.0)) as u32;
    let y_hi = ((circle.cy + reach).ceil().min(canvas.height() as f64 - 1.0)) as u32;
    for y in y_lo..=y_hi {
        let dy = y as f64 - circle.cy;
        for x in x_lo..=x_hi {
            let dx = x as f64 - circle.cx;
            let u = dx * cos - dy * sin;
            let v = dx * sin + dy * cos;
            let inside = u.abs() <= half && v.abs() <= half;
            if inside && u.abs().max(v.abs()) >= half - 1.0 {
                canvas.set_pixel(x, y, PREVIEW_SQUARE);
            }
        }
    }
}
