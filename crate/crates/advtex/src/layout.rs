//! Circle layouts under overlap and mask constraints.
//!
//! A layout is a set of circles on the texture plane. A candidate circle is
//! admissible when its center sits on an allowed mask pixel and it keeps a
//! center distance of at least `gamma * (r_i + r_j)` to every circle already
//! recorded (equality admissible). Initialization samples circle count, area
//! ratio, and center from the run's random stream in that fixed order,
//! resampling rejected centers up to a budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SearchRng;

/// A circle in texture pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("circle radius must be positive, got {r}")));
        }
        if !cx.is_finite() || !cy.is_finite() {
            return Err(Error::InvalidArgument("circle center must be finite".into()));
        }
        Ok(Self { cx, cy, r })
    }

    pub fn center_distance(&self, other: &Circle) -> f64 {
        let dx = self.cx - other.cx;
        let dy = self.cy - other.cy;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Binary paintable-region mask; dimensions match the base texture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    allowed: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32, allowed: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "mask dimensions must be positive, got {width}x{height}"
            )));
        }
        if allowed.len() != width as usize * height as usize {
            return Err(Error::InvalidArgument(format!(
                "mask grid length {} does not match {width}x{height}",
                allowed.len()
            )));
        }
        Ok(Self { width, height, allowed })
    }

    pub fn all_allowed(width: u32, height: u32) -> Result<Self> {
        Self::new(width, height, vec![true; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn area(&self) -> f64 {
        self.width as f64 * self.height as f64
    }

    pub fn allowed_count(&self) -> usize {
        self.allowed.iter().filter(|a| **a).count()
    }

    #[inline]
    pub fn allowed_at(&self, x: u32, y: u32) -> bool {
        self.allowed[y as usize * self.width as usize + x as usize]
    }

    /// Mask test for a continuous center: round to the nearest pixel,
    /// clamped to the grid.
    pub fn allows_center(&self, cx: f64, cy: f64) -> bool {
        let x = (cx.round() as i64).clamp(0, self.width as i64 - 1) as u32;
        let y = (cy.round() as i64).clamp(0, self.height as i64 - 1) as u32;
        self.allowed_at(x, y)
    }

    /// Decode from an 8-bit grayscale image: value >= 128 means paintable.
    pub fn load_png(path: &std::path::Path) -> Result<Self> {
        let img = image::open(path)
            .map_err(|e| Error::ImageDecode { path: path.to_path_buf(), message: e.to_string() })?
            .to_luma8();
        let (w, h) = (img.width(), img.height());
        let allowed = img.into_raw().into_iter().map(|v| v >= 128).collect();
        Self::new(w, h, allowed)
    }

    pub fn save_png(&self, path: &std::path::Path) -> Result<()> {
        let bytes: Vec<u8> = self.allowed.iter().map(|a| if *a { 255 } else { 0 }).collect();
        let img = image::GrayImage::from_raw(self.width, self.height, bytes)
            .expect("grid length is checked at construction");
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| Error::ImageDecode { path: path.to_path_buf(), message: e.to_string() })
    }
}

/// How stickers are assigned to circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionStrategy {
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "important-aware")]
    ImportantAware,
}

/// Search hyperparameters. Defaults follow the vehicle setup: 5..15
/// stickers, area ratios 0.001..0.1, gamma 1, objectness threshold 0.5.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_min: u32,
    pub n_max: u32,
    pub a_min: f64,
    pub a_max: f64,
    pub gamma: f64,
    pub tau: f64,
    pub itr_max: u32,
    pub target_class: i64,
    pub seed: u64,
    #[serde(default = "default_max_resamples")]
    pub max_resamples: u32,
    pub selection: SelectionStrategy,
    /// Cache oracle fitness by texture digest. Disable to force one oracle
    /// query per candidate texture even when contents repeat.
    #[serde(default = "default_true")]
    pub cache_fitness: bool,
    /// Attempts per oracle query for oracles that declare themselves
    /// retryable (external processes). Synthetic oracles get one attempt.
    #[serde(default = "default_oracle_retries")]
    pub oracle_retries: u32,
}

fn default_max_resamples() -> u32 {
    1000
}

fn default_true() -> bool {
    true
}

fn default_oracle_retries() -> u32 {
    3
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_min: 5,
            n_max: 15,
            a_min: 0.001,
            a_max: 0.1,
            gamma: 1.0,
            tau: 0.5,
            itr_max: 10_000,
            target_class: 0,
            seed: 0,
            max_resamples: default_max_resamples(),
            selection: SelectionStrategy::Random,
            cache_fitness: true,
            oracle_retries: default_oracle_retries(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_min < 1 {
            return fail(format!("n_min must be >= 1, got {}", self.n_min));
        }
        if self.n_max < self.n_min {
            return fail(format!("n_max ({}) must be >= n_min ({})", self.n_max, self.n_min));
        }
        if !(self.a_min > 0.0) {
            return fail(format!("a_min must be positive, got {}", self.a_min));
        }
        if self.a_max < self.a_min {
            return fail(format!("a_max ({}) must be >= a_min ({})", self.a_max, self.a_min));
        }
        if self.a_max > 0.1 {
            return fail(format!("a_max must not exceed 0.1, got {}", self.a_max));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return fail(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return fail(format!("tau must lie in (0, 1), got {}", self.tau));
        }
        if self.itr_max < 1 {
            return fail("itr_max must be >= 1".into());
        }
        if self.max_resamples < 1 {
            return fail("max_resamples must be >= 1".into());
        }
        Ok(())
    }
}

/// An accepted set of circles plus the overlap factor they were checked
/// under.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub circles: Vec<Circle>,
    pub gamma: f64,
}

impl Layout {
    pub fn empty(gamma: f64) -> Self {
        Self { circles: Vec::new(), gamma }
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }
}

/// Radius giving a circle whose squared scale follows the area ratio rule:
/// `r = sqrt(texture_area * ratio)`.
pub fn radius_from_ratio(texture_area: f64, ratio: f64) -> Result<f64> {
    if !(texture_area > 0.0) || !texture_area.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "texture area must be positive, got {texture_area}"
        )));
    }
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!("area ratio must be positive, got {ratio}")));
    }
    Ok((texture_area * ratio).sqrt())
}

/// Pairwise admissibility under the overlap rule; distance equal to
/// `gamma * (r_i + r_j)` is admissible. Symmetric in its circle arguments.
pub fn pairwise_admissible(a: &Circle, b: &Circle, gamma: f64) -> bool {
    a.center_distance(b) >= gamma * (a.r + b.r)
}

/// Admissibility of a candidate against the recorded circles: the center
/// must land on an allowed mask pixel (only the center is tested) and the
/// overlap rule must hold against every recorded circle.
pub fn check_circle(candidate: &Circle, recorded: &Layout, mask: &Mask, gamma: f64) -> Result<bool> {
    if !candidate.cx.is_finite()
        || !candidate.cy.is_finite()
        || candidate.cx < 0.0
        || candidate.cx >= mask.width() as f64
        || candidate.cy < 0.0
        || candidate.cy >= mask.height() as f64
    {
        return Err(Error::InvalidArgument(format!(
            "circle center ({}, {}) lies outside the {}x{} texture",
            candidate.cx,
            candidate.cy,
            mask.width(),
            mask.height()
        )));
    }
    if !mask.allows_center(candidate.cx, candidate.cy) {
        return Ok(false);
    }
    Ok(recorded.circles.iter().all(|c| pairwise_admissible(candidate, c, gamma)))
}

/// Constrained random initialization.
///
/// Draw order per run: circle count `n`, then per circle an (area ratio,
/// center...) sequence. A rejected center is redrawn with the same radius up
/// to `max_resamples` times, after which a fresh ratio is drawn; a circle
/// that exhausts `max_resamples` fresh ratios fails the whole layout.
pub fn init_layout(config: &SearchConfig, mask: &Mask, rng: &mut SearchRng) -> Result<Layout> {
    config.validate()?;
    if mask.allowed_count() == 0 {
        return Err(Error::EmptyMask);
    }

    let area = mask.area();
    let n = rng.index_inclusive(config.n_min, config.n_max);
    let mut layout = Layout::empty(config.gamma);

    for circle_index in 0..n as usize {
        let mut placed = false;
        'ratio: for _ in 0..config.max_resamples {
            let ratio = rng.real_inclusive(config.a_min, config.a_max);
            let r = radius_from_ratio(area, ratio)?;
            for _ in 0..config.max_resamples {
                let cx = rng.real_below(mask.width() as f64);
                let cy = rng.real_below(mask.height() as f64);
                let candidate = Circle { cx, cy, r };
                if check_circle(&candidate, &layout, mask, config.gamma)? {
                    layout.circles.push(candidate);
                    placed = true;
                    break 'ratio;
                }
            }
        }
        if !placed {
            return Err(Error::LayoutInfeasible {
                circle_index,
                attempts: config.max_resamples as u64 * config.max_resamples as u64,
            });
        }
    }
    Ok(layout)
}

/// Aggregate figures for a layout over a mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutStats {
    pub count: usize,
    /// Sum of individual circle areas (pi r^2); circles do not overlap.
    pub total_circle_area: f64,
    /// Allowed pixels whose grid point falls inside any circle, over all
    /// allowed pixels.
    pub covered_mask_fraction: f64,
}

pub fn layout_stats(layout: &Layout, mask: &Mask) -> LayoutStats {
    let total_circle_area =
        layout.circles.iter().map(|c| std::f64::consts::PI * c.r * c.r).sum::<f64>();

    let mut allowed = 0u64;
    let mut covered = 0u64;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if !mask.allowed_at(x, y) {
                continue;
            }
            allowed += 1;
            let (px, py) = (x as f64, y as f64);
            let inside = layout.circles.iter().any(|c| {
                let dx = px - c.cx;
                let dy = py - c.cy;
                dx * dx + dy * dy <= c.r * c.r
            });
            if inside {
                covered += 1;
            }
        }
    }
    let covered_mask_fraction = if allowed == 0 { 0.0 } else { covered as f64 / allowed as f64 };
    LayoutStats { count: layout.len(), total_circle_area, covered_mask_fraction }
}

/// All layout-invariant violations, as printable findings. Empty means the
/// layout is admissible for `gamma` over `mask`.
pub fn layout_violations(layout: &Layout, mask: &Mask) -> Vec<String> {
    let mut findings = Vec::new();
    for (i, c) in layout.circles.iter().enumerate() {
        if !(c.r > 0.0) {
            findings.push(format!("circle {i}: radius {} is not positive", c.r));
        }
        if c.cx < 0.0 || c.cx >= mask.width() as f64 || c.cy < 0.0 || c.cy >= mask.height() as f64 {
            findings.push(format!(
                "circle {i}: center ({}, {}) outside the {}x{} texture",
                c.cx,
                c.cy,
                mask.width(),
                mask.height()
            ));
        } else if !mask.allows_center(c.cx, c.cy) {
            findings.push(format!("circle {i}: center ({}, {}) on a forbidden mask pixel", c.cx, c.cy));
        }
    }
    for i in 0..layout.circles.len() {
        for j in (i + 1)..layout.circles.len() {
            let (a, b) = (&layout.circles[i], &layout.circles[j]);
            if !pairwise_admissible(a, b, layout.gamma) {
                findings.push(format!(
                    "circles {i} and {j}: center distance {:.6} below gamma*(r_i+r_j) = {:.6}",
                    a.center_distance(b),
                    layout.gamma * (a.r + b.r)
                ));
            }
        }
    }
    findings
}
