//! The candidate sticker set and the two selection strategies: uniform
//! random, and important-aware gain maximization (argmax over the pool of
//! the fitness drop each sticker would cause in the current circle).

use std::path::{Path, PathBuf};

use crate::compose::{paste_sticker, Placement};
use crate::error::{Error, Result};
use crate::layout::Circle;
use crate::oracle::{FitnessOracle, ViewSpec};
use crate::rng::SearchRng;
use crate::search::{fitness_cached, FitnessCache};
use crate::texture::TextureCanvas;

/// An RGBA sticker image with a stable id (its file stem).
#[derive(Debug, Clone, PartialEq)]
pub struct Sticker {
    id: String,
    width: u32,
    height: u32,
    rgba: Vec<u8>,
}

impl Sticker {
    pub fn from_rgba(id: &str, width: u32, height: u32, rgba: Vec<u8>) -> Result<Self> {
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!(
                "sticker id `{id}` must be non-empty and free of whitespace"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "sticker `{id}` dimensions must be positive, got {width}x{height}"
            )));
        }
        if rgba.len() != width as usize * height as usize * 4 {
            return Err(Error::InvalidArgument(format!(
                "sticker `{id}` buffer length {} does not match {width}x{height}x4",
                rgba.len()
            )));
        }
        Ok(Self { id: id.to_string(), width, height, rgba })
    }

    pub fn load_png(path: &Path) -> Result<Self> {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::InvalidArgument(format!("no usable file stem in `{}`", path.display())))?
            .to_string();
        let img = image::open(path)
            .map_err(|e| Error::ImageDecode { path: path.to_path_buf(), message: e.to_string() })?
            .to_rgba8();
        Self::from_rgba(&id, img.width(), img.height(), img.into_raw())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn rgba(&self) -> &[u8] {
        &self.rgba
    }
}

/// Id-ordered sticker collection; never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct StickerPool {
    stickers: Vec<Sticker>,
}

impl StickerPool {
    pub fn from_stickers(mut stickers: Vec<Sticker>) -> Result<Self> {
        if stickers.is_empty() {
            return Err(Error::InvalidArgument("sticker pool must hold at least one sticker".into()));
        }
        stickers.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in stickers.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateStickerId(pair[0].id.clone()));
            }
        }
        Ok(Self { stickers })
    }

    /// Load every PNG in a directory; ids are file stems, iteration order is
    /// lexicographic by id.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<PathBuf> = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let path = entry.path();
            let is_png = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png"));
            if is_png {
                paths.push(path);
            }
        }
        if paths.is_empty() {
            return Err(Error::EmptyPool(dir.to_path_buf()));
        }
        paths.sort();
        let stickers = paths.iter().map(|p| Sticker::load_png(p)).collect::<Result<Vec<_>>>()?;
        Self::from_stickers(stickers)
    }

    pub fn get(&self, id: &str) -> Result<&Sticker> {
        self.stickers
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .map(|i| &self.stickers[i])
            .map_err(|_| Error::MissingSticker(id.to_string()))
    }

    pub fn stickers(&self) -> &[Sticker] {
        &self.stickers
    }

    pub fn len(&self) -> usize {
        self.stickers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stickers.is_empty()
    }
}

/// Uniform pick over the pool, one index draw from the stream.
pub fn select_random<'p>(pool: &'p StickerPool, rng: &mut SearchRng) -> &'p Sticker {
    &pool.stickers()[rng.index(pool.len())]
}

/// Diversification transform: half the time a uniform angle in
/// [-30, +30] degrees, otherwise no rotation. The branch draw always
/// consumes one stream value; the angle draw only happens on the rotate
/// branch.
pub fn random_transform(rng: &mut SearchRng) -> f64 {
    let p = rng.unit();
    if p <= 0.5 {
        rng.real_inclusive(-30.0, 30.0)
    } else {
        0.0
    }
}

/// Everything a gain evaluation needs to query fitness.
pub struct GainContext<'a> {
    pub oracle: &'a mut dyn FitnessOracle,
    pub views: &'a [ViewSpec],
    pub tau: f64,
    pub target_class: i64,
    pub cache: Option<&'a mut FitnessCache>,
    pub oracle_retries: u32,
}

/// The texture being grown this iteration together with its known fitness.
#[derive(Debug, Clone)]
pub struct TextureState {
    pub texture: TextureCanvas,
    pub fitness: u32,
}

/// Result of evaluating one candidate sticker for one circle.
#[derive(Debug, Clone)]
pub struct GainOutcome {
    /// Fitness drop the paste would cause; positive is good.
    pub gain: i64,
    pub candidate_fitness: u32,
    pub candidate: TextureCanvas,
}

/// Gain of pasting `sticker` into `circle` on the current texture:
/// `f(current) - f(current with sticker)`. Exactly one oracle evaluation of
/// the candidate texture, short-circuited by the digest cache when the
/// candidate was seen before.
pub fn compute_gain(
    ctx: &mut GainContext<'_>,
    current: &TextureState,
    circle: &Circle,
    base_rotation: f64,
    sticker: &Sticker,
) -> Result<GainOutcome> {
    let placement = Placement {
        circle: *circle,
        sticker_id: sticker.id().to_string(),
        rotation_degrees: base_rotation,
    };
    let candidate = paste_sticker(&current.texture, &placement, sticker)?;
    let report = fitness_cached(
        ctx.oracle,
        &candidate,
        ctx.views,
        ctx.tau,
        ctx.target_class,
        ctx.cache.as_deref_mut(),
        ctx.oracle_retries,
    )?;
    Ok(GainOutcome {
        gain: current.fitness as i64 - report.fitness as i64,
        candidate_fitness: report.fitness,
        candidate,
    })
}

/// The winning sticker for a circle plus the full gain table.
#[derive(Debug, Clone)]
pub struct SelectionOutcome {
    pub sticker_id: String,
    pub gain: i64,
    pub candidate_fitness: u32,
    pub candidate: TextureCanvas,
    /// Per-sticker gains in id order, for observers and audits.
    pub gains: Vec<(String, i64)>,
}

/// Argmax of `compute_gain` over the pool; ties break toward the lowest
/// sticker id. The caller draws any post-selection transform afterwards.
pub fn select_important(
    ctx: &mut GainContext<'_>,
    current: &TextureState,
    circle: &Circle,
    base_rotation: f64,
    pool: &StickerPool,
) -> Result<SelectionOutcome> {
    let mut best: Option<(usize, GainOutcome)> = None;
    let mut gains = Vec::with_capacity(pool.len());
    for (index, sticker) in pool.stickers().iter().enumerate() {
        let outcome = compute_gain(ctx, current, circle, base_rotation, sticker)?;
        gains.push((sticker.id().to_string(), outcome.gain));
        let better = match &best {
            None => true,
            // Strict comparison keeps the earliest (lowest-id) maximum.
            Some((_, incumbent)) => outcome.gain > incumbent.gain,
        };
        if better {
            best = Some((index, outcome));
        }
    }
    let (index, outcome) = best.expect("pool is never empty");
    Ok(SelectionOutcome {
        sticker_id: pool.stickers()[index].id().to_string(),
        gain: outcome.gain,
        candidate_fitness: outcome.candidate_fitness,
        candidate: outcome.candidate,
        gains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ViewResult;

    fn solid(id: &str, rgb: [u8; 3], alpha: u8) -> Sticker {
        let mut rgba = Vec::new();
        for _ in 0..16 {
            rgba.extend_from_slice(&[rgb[0], rgb[1], rgb[2], alpha]);
        }
        Sticker::from_rgba(id, 4, 4, rgba).unwrap()
    }

    #[test]
    fn pool_sorts_and_rejects_duplicates() {
        let pool = StickerPool::from_stickers(vec![
            solid("zebra", [1, 1, 1], 255),
            solid("ant", [2, 2, 2], 255),
        ])
        .unwrap();
        let ids: Vec<&str> = pool.stickers().iter().map(|s| s.id()).collect();
        assert_eq!(ids, vec!["ant", "zebra"]);

        let dup = StickerPool::from_stickers(vec![
            solid("same", [1, 1, 1], 255),
            solid("same", [2, 2, 2], 255),
        ]);
        assert!(matches!(dup, Err(Error::DuplicateStickerId(id)) if id == "same"));
    }

    #[test]
    fn pool_load_dir_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(StickerPool::load_dir(dir.path()), Err(Error::EmptyPool(_))));

        std::fs::write(dir.path().join("broken.png"), b"not a png").unwrap();
        assert!(matches!(StickerPool::load_dir(dir.path()), Err(Error::ImageDecode { .. })));
    }

    #[test]
    fn pool_load_dir_reads_stems() {
        let dir = tempfile::tempdir().unwrap();
        for (name, color) in [("b_dot", [0u8, 0, 255]), ("a_dot", [255, 0, 0])] {
            let img = image::RgbImage::from_pixel(2, 2, image::Rgb(color));
            img.save(dir.path().join(format!("{name}.png"))).unwrap();
        }
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let pool = StickerPool::load_dir(dir.path()).unwrap();
        let ids: Vec<&str> = pool.stickers().iter().map(|s| s.id()).collect();
        assert_eq!(ids, vec!["a_dot", "b_dot"]);
    }

    #[test]
    fn select_random_is_uniform_and_deterministic() {
        let pool = StickerPool::from_stickers(vec![
            solid("a", [1, 0, 0], 255),
            solid("b", [0, 1, 0], 255),
            solid("c", [0, 0, 1], 255),
            solid("d", [1, 1, 0], 255),
        ])
        .unwrap();

        let mut rng = SearchRng::seed_from_u64(5);
        let mut counts = std::collections::HashMap::new();
        let draws = 100_000;
        for _ in 0..draws {
            *counts.entry(select_random(&pool, &mut rng).id().to_string()).or_insert(0usize) += 1;
        }
        for id in ["a", "b", "c", "d"] {
            let freq = counts[id] as f64 / draws as f64;
            assert!((freq - 0.25).abs() <= 0.01, "frequency of {id} was {freq}");
        }

        let mut r1 = SearchRng::seed_from_u64(77);
        let mut r2 = SearchRng::seed_from_u64(77);
        for _ in 0..100 {
            assert_eq!(select_random(&pool, &mut r1).id(), select_random(&pool, &mut r2).id());
        }
    }

    #[test]
    fn transform_angles_bounded_and_half_zero() {
        let mut rng = SearchRng::seed_from_u64(123);
        let draws = 100_000;
        let mut zeros = 0usize;
        for _ in 0..draws {
            let angle = random_transform(&mut rng);
            assert!((-30.0..=30.0).contains(&angle));
            if angle == 0.0 {
                zeros += 1;
            }
        }
        let zero_frac = zeros as f64 / draws as f64;
        assert!((zero_frac - 0.5).abs() <= 0.01, "zero fraction was {zero_frac}");
    }

    #[test]
    fn transform_is_deterministic() {
        let mut a = SearchRng::seed_from_u64(9);
        let mut b = SearchRng::seed_from_u64(9);
        for _ in 0..50 {
            assert_eq!(random_transform(&mut a), random_transform(&mut b));
        }
    }

    /// Oracle that reports one view per scripted fitness table: the fitness
    /// equals how many entries of `detected_for` match the texture digest.
    struct TableOracle {
        detected_per_digest: std::collections::HashMap<String, u32>,
        fallback: u32,
    }

    impl FitnessOracle for TableOracle {
        fn evaluate(&mut self, texture: &TextureCanvas, views: &[ViewSpec]) -> Result<Vec<ViewResult>> {
            let detected =
                *self.detected_per_digest.get(&texture.digest()).unwrap_or(&self.fallback);
            Ok(views
                .iter()
                .enumerate()
                .map(|(i, v)| ViewResult {
                    view_id: v.id,
                    detected: false,
                    objectness: if (i as u32) < detected { 0.9 } else { 0.1 },
                    class_id: 0,
                    bbox: None,
                })
                .collect())
        }
    }

    #[test]
    fn gain_is_fitness_difference() {
        // f(current) = 10, f(candidate) = 7 -> gain 3.
        let base = TextureCanvas::new(32, 32, [10, 10, 10]).unwrap();
        let sticker = solid("s", [200, 0, 0], 255);
        let views: Vec<ViewSpec> =
            (0..12).map(|i| ViewSpec { id: i, yaw_degrees: 0.0, tag: String::new() }).collect();

        let placement = Placement {
            circle: Circle { cx: 16.0, cy: 16.0, r: 6.0 },
            sticker_id: "s".into(),
            rotation_degrees: 0.0,
        };
        let candidate = paste_sticker(&base, &placement, &sticker).unwrap();

        let mut table = std::collections::HashMap::new();
        table.insert(base.digest(), 10);
        table.insert(candidate.digest(), 7);
        let mut oracle = TableOracle { detected_per_digest: table, fallback: 0 };

        let mut cache = FitnessCache::new();
        let mut ctx = GainContext {
            oracle: &mut oracle,
            views: &views,
            tau: 0.5,
            target_class: 0,
            cache: Some(&mut cache),
            oracle_retries: 1,
        };
        let state = TextureState { texture: base, fitness: 10 };
        let outcome =
            compute_gain(&mut ctx, &state, &placement.circle, 0.0, &sticker).unwrap();
        assert_eq!(outcome.gain, 3);
        assert_eq!(outcome.candidate_fitness, 7);
    }

    #[test]
    fn transparent_sticker_has_zero_gain_via_cache() {
        let base = TextureCanvas::new(32, 32, [10, 10, 10]).unwrap();
        let ghost = solid("ghost", [200, 0, 0], 0);
        let views =
            vec![ViewSpec { id: 0, yaw_degrees: 0.0, tag: String::new() }];

        let mut table = std::collections::HashMap::new();
        table.insert(base.digest(), 1);
        let mut oracle = TableOracle { detected_per_digest: table, fallback: 0 };
        let mut cache = FitnessCache::new();
        // Prime the cache with the current texture's report.
        fitness_cached(&mut oracle, &base, &views, 0.5, 0, Some(&mut cache), 1).unwrap();

        let mut ctx = GainContext {
            oracle: &mut oracle,
            views: &views,
            tau: 0.5,
            target_class: 0,
            cache: Some(&mut cache),
            oracle_retries: 1,
        };
        let state = TextureState { texture: base, fitness: 1 };
        let circle = Circle { cx: 16.0, cy: 16.0, r: 6.0 };
        let outcome = compute_gain(&mut ctx, &state, &circle, 0.0, &ghost).unwrap();
        assert_eq!(outcome.gain, 0);
    }

    #[test]
    fn argmax_breaks_ties_toward_lowest_id() {
        // Gains {a: 3, b: 3, c: 1} -> a.
        let base = TextureCanvas::new(32, 32, [10, 10, 10]).unwrap();
        let circle = Circle { cx: 16.0, cy: 16.0, r: 6.0 };
        let stickers =
            vec![solid("a", [200, 0, 0], 255), solid("b", [0, 200, 0], 255), solid("c", [0, 0, 200], 255)];
        let views: Vec<ViewSpec> =
            (0..8).map(|i| ViewSpec { id: i, yaw_degrees: 0.0, tag: String::new() }).collect();

        let mut table = std::collections::HashMap::new();
        table.insert(base.digest(), 5);
        for (sticker, fit) in stickers.iter().zip([2u32, 2, 4]) {
            let placement = Placement {
                circle,
                sticker_id: sticker.id().to_string(),
                rotation_degrees: 0.0,
            };
            let candidate = paste_sticker(&base, &placement, sticker).unwrap();
            table.insert(candidate.digest(), fit);
        }
        let mut oracle = TableOracle { detected_per_digest: table, fallback: 0 };
        let pool = StickerPool::from_stickers(stickers).unwrap();

        let mut ctx = GainContext {
            oracle: &mut oracle,
            views: &views,
            tau: 0.5,
            target_class: 0,
            cache: None,
            oracle_retries: 1,
        };
        let state = TextureState { texture: base, fitness: 5 };
        let outcome = select_important(&mut ctx, &state, &circle, 0.0, &pool).unwrap();
        assert_eq!(outcome.sticker_id, "a");
        assert_eq!(outcome.gain, 3);
        assert_eq!(outcome.gains, vec![("a".into(), 3), ("b".into(), 3), ("c".into(), 1)]);
    }

    #[test]
    fn single_sticker_pool_always_selected() {
        let base = TextureCanvas::new(32, 32, [10, 10, 10]).unwrap();
        let pool = StickerPool::from_stickers(vec![solid("only", [1, 2, 3], 255)]).unwrap();
        let views = vec![ViewSpec { id: 0, yaw_degrees: 0.0, tag: String::new() }];
        let mut oracle =
            TableOracle { detected_per_digest: std::collections::HashMap::new(), fallback: 1 };
        let mut ctx = GainContext {
            oracle: &mut oracle,
            views: &views,
            tau: 0.5,
            target_class: 0,
            cache: None,
            oracle_retries: 1,
        };
        let state = TextureState { texture: base, fitness: 1 };
        let circle = Circle { cx: 16.0, cy: 16.0, r: 6.0 };
        let outcome = select_important(&mut ctx, &state, &circle, 0.0, &pool).unwrap();
        assert_eq!(outcome.sticker_id, "only");
        // Gain may even be negative; the only sticker still wins.
        assert_eq!(outcome.gain, 0);
    }
}
