//! Deterministic synthetic multispectral scenes with ground truth.
//!
//! A scene is a background class with elliptical patches of water, soil,
//! green vegetation or flowering iris painted over it. Iris foliage shares
//! the band statistics of ordinary vegetation; only the flowers (small
//! additive GREEN and RED peaks) tell the two apart.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::calibration::LabeledKnowledge;
use crate::error::{Error, Result};
use crate::raster::{
    BinaryMask, Connectivity, GeoTransform, MultispectralRaster, Plane, MANDATORY_BANDS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandClass {
    Water,
    Soil,
    GreenVegetation,
    Yfi,
}

impl LandClass {
    pub fn code(self) -> u8 {
        match self {
            LandClass::Water => 0,
            LandClass::Soil => 1,
            LandClass::GreenVegetation => 2,
            LandClass::Yfi => 3,
        }
    }
}

/// Per-band mean and standard deviation, in `GREEN, RED, REDEDGE, NIR`
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandStats {
    pub mean: [f32; 4],
    pub std: [f32; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassStats {
    pub water: BandStats,
    pub soil: BandStats,
    pub green_vegetation: BandStats,
    pub yfi: BandStats,
}

impl Default for ClassStats {
    fn default() -> Self {
        let foliage = BandStats {
            mean: [0.08, 0.04, 0.20, 0.40],
            std: [0.005; 4],
        };
        Self {
            water: BandStats {
                mean: [0.05, 0.03, 0.02, 0.01],
                std: [0.004; 4],
            },
            soil: BandStats {
                mean: [0.10, 0.15, 0.17, 0.19],
                std: [0.005; 4],
            },
            green_vegetation: foliage,
            yfi: foliage,
        }
    }
}

impl ClassStats {
    pub fn get(&self, class: LandClass) -> &BandStats {
        match class {
            LandClass::Water => &self.water,
            LandClass::Soil => &self.soil,
            LandClass::GreenVegetation => &self.green_vegetation,
            LandClass::Yfi => &self.yfi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowerModel {
    pub green_amplitude: f32,
    pub red_amplitude: f32,
    /// Side of the square flower footprint, 1 or 2 pixels.
    pub footprint: usize,
    /// Minimum Chebyshev distance between flower origins.
    pub min_spacing: usize,
}

impl Default for FlowerModel {
    fn default() -> Self {
        Self {
            green_amplitude: 0.2,
            red_amplitude: 0.2,
            footprint: 2,
            min_spacing: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub class: LandClass,
    /// `(row, col)` of the ellipse centre.
    pub center: [f64; 2],
    /// Semi-axes along rows and columns before rotation.
    pub semi_axes: [f64; 2],
    #[serde(default)]
    pub angle_deg: f64,
    #[serde(default)]
    pub flower_count: usize,
}

impl PatchSpec {
    fn contains(&self, row: f64, col: f64, scale: f64) -> bool {
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        let (dr, dc) = (row - self.center[0], col - self.center[1]);
        let u = c * dr + s * dc;
        let v = -s * dr + c * dc;
        let (a, b) = (self.semi_axes[0] * scale, self.semi_axes[1] * scale);
        (u / a).powi(2) + (v / b).powi(2) <= 1.0
    }

    fn bbox(&self, width: usize, height: usize) -> (usize, usize, usize, usize) {
        let reach = self.semi_axes[0].max(self.semi_axes[1]).ceil();
        let clampi = |v: f64, hi: usize| v.max(0.0).min(hi as f64) as usize;
        (
            clampi(self.center[0] - reach, height),
            clampi(self.center[1] - reach, width),
            clampi(self.center[0] + reach + 1.0, height),
            clampi(self.center[1] + reach + 1.0, width),
        )
    }
}

/// Automatic patch placement on a jittered grid of cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutSpec {
    pub yfi_patches: usize,
    pub vegetation_patches: usize,
    /// Adds one large water body in the lower-right part of the scene.
    pub water: bool,
    /// Inclusive range of flowers per iris patch.
    pub flowers: [usize; 2],
    /// Range of ellipse semi-axes, pixels.
    pub semi_axis: [f64; 2],
    /// Grid cell side, pixels; one patch per cell at most.
    pub cell: usize,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        Self {
            yfi_patches: 4,
            vegetation_patches: 2,
            water: true,
            flowers: [22, 34],
            semi_axis: [45.0, 70.0],
            cell: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    #[serde(default = "default_background")]
    pub background: LandClass,
    #[serde(default)]
    pub patches: Vec<PatchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutSpec>,
    #[serde(default)]
    pub class_stats: ClassStats,
    #[serde(default)]
    pub flower: FlowerModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geotransform: Option<GeoTransform>,
}

fn default_background() -> LandClass {
    LandClass::Soil
}

impl SceneSpec {
    pub fn new(width: usize, height: usize, seed: u64) -> Self {
        Self {
            width,
            height,
            seed,
            background: LandClass::Soil,
            patches: Vec::new(),
            layout: None,
            class_stats: ClassStats::default(),
            flower: FlowerModel::default(),
            geotransform: None,
        }
    }

    pub fn with_layout(mut self, layout: LayoutSpec) -> Self {
        self.layout = Some(layout);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Scene("scene must be at least 1x1".into()));
        }
        for class in [
            LandClass::Water,
            LandClass::Soil,
            LandClass::GreenVegetation,
            LandClass::Yfi,
        ] {
            let s = self.class_stats.get(class);
            if s.mean
                .iter()
                .chain(&s.std)
                .any(|v| !v.is_finite() || *v < 0.0)
            {
                return Err(Error::Scene(format!(
                    "{class:?} statistics must be finite and nonnegative"
                )));
            }
            if class != LandClass::Water && s.mean[1] + s.mean[3] <= 0.0 {
                return Err(Error::Scene(format!("{class:?} needs NIR + RED > 0")));
            }
        }
        if !(1..=2).contains(&self.flower.footprint) {
            return Err(Error::Scene(format!(
                "flower footprint must be 1 or 2, got {}",
                self.flower.footprint
            )));
        }
        for p in &self.patches {
            if p.semi_axes.iter().any(|&a| !(a.is_finite() && a > 0.0)) {
                return Err(Error::Scene("patch semi-axes must be positive".into()));
            }
            if p.class != LandClass::Yfi && p.flower_count > 0 {
                return Err(Error::Scene(format!(
                    "{:?} patches cannot carry flowers",
                    p.class
                )));
            }
        }
        Ok(())
    }

    /// Explicit patches followed by any layout-generated ones.
    pub fn expanded_patches(&self) -> Result<Vec<PatchSpec>> {
        let mut patches = self.patches.clone();
        if let Some(layout) = &self.layout {
            patches.extend(layout_patches(self.width, self.height, self.seed, layout)?);
        }
        Ok(patches)
    }
}

fn layout_patches(
    width: usize,
    height: usize,
    seed: u64,
    layout: &LayoutSpec,
) -> Result<Vec<PatchSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5ca1_ab1e_0000_0001);
    let [amin, amax] = layout.semi_axis;
    if !(amin > 0.0 && amin <= amax) || layout.flowers[0] > layout.flowers[1] {
        return Err(Error::Scene(
            "layout ranges must be ordered and positive".into(),
        ));
    }
    let margin = 20.0;
    let cell = layout.cell as f64;
    let jitter = cell / 2.0 - amax - margin;
    if jitter < 0.0 {
        return Err(Error::Scene(format!(
            "cell {} too small for semi-axes up to {amax}",
            layout.cell
        )));
    }
    let mut patches = Vec::new();
    let mut water_box = None;
    if layout.water {
        let (h, w) = (height as f64, width as f64);
        let water = PatchSpec {
            class: LandClass::Water,
            center: [0.78 * h, 0.78 * w],
            semi_axes: [0.16 * h, 0.16 * w],
            angle_deg: 0.0,
            flower_count: 0,
        };
        water_box = Some((
            water.center[0] - water.semi_axes[0] - margin,
            water.center[1] - water.semi_axes[1] - margin,
            water.center[0] + water.semi_axes[0] + margin,
            water.center[1] + water.semi_axes[1] + margin,
        ));
        patches.push(water);
    }
    let mut cells = Vec::new();
    for gr in 0..height / layout.cell {
        for gc in 0..width / layout.cell {
            let (r0, c0) = (gr as f64 * cell, gc as f64 * cell);
            let clear = water_box.is_none_or(|(wr0, wc0, wr1, wc1)| {
                r0 + cell <= wr0 || r0 >= wr1 || c0 + cell <= wc0 || c0 >= wc1
            });
            if clear {
                cells.push((r0, c0));
            }
        }
    }
    let needed = layout.yfi_patches + layout.vegetation_patches;
    if cells.len() < needed {
        return Err(Error::Scene(format!(
            "layout needs {needed} cells, scene has room for {}",
            cells.len()
        )));
    }
    cells.shuffle(&mut rng);
    for (i, &(r0, c0)) in cells[..needed].iter().enumerate() {
        let class = if i < layout.yfi_patches {
            LandClass::Yfi
        } else {
            LandClass::GreenVegetation
        };
        let semi_axes = [rng.random_range(amin..=amax), rng.random_range(amin..=amax)];
        let center = [
            r0 + cell / 2.0 + rng.random_range(-jitter..=jitter),
            c0 + cell / 2.0 + rng.random_range(-jitter..=jitter),
        ];
        let angle_deg = rng.random_range(0.0..180.0);
        let flower_count = if class == LandClass::Yfi {
            rng.random_range(layout.flowers[0]..=layout.flowers[1])
        } else {
            0
        };
        patches.push(PatchSpec {
            class,
            center,
            semi_axes,
            angle_deg,
            flower_count,
        });
    }
    Ok(patches)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flower {
    /// 1-based index into the expanded patch list.
    pub patch: u32,
    /// Top-left pixel of the footprint.
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub yfi_mask: BinaryMask,
    pub flower_positions: Vec<Flower>,
    /// [`LandClass::code`] per pixel.
    pub class_map: Plane<u8>,
    /// 0 for background, otherwise the 1-based patch index.
    pub patch_map: Plane<u32>,
    pub patches: Vec<PatchSpec>,
    pub flower_footprint: usize,
}

impl GroundTruth {
    pub fn class_mask(&self, class: LandClass) -> BinaryMask {
        let code = class.code();
        BinaryMask::from_plane(&self.class_map, |v| v == code)
    }

    pub fn patch_mask(&self, id: u32) -> BinaryMask {
        BinaryMask::from_plane(&self.patch_map, |v| v == id)
    }

    /// 1-based ids of patches of `class`, in spec order.
    pub fn patch_ids(&self, class: LandClass) -> Vec<u32> {
        self.patches
            .iter()
            .enumerate()
            .filter(|(_, p)| p.class == class)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    pub fn flower_mask(&self) -> BinaryMask {
        let mut m = BinaryMask::new(self.class_map.width(), self.class_map.height());
        for f in &self.flower_positions {
            for r in f.row..f.row + self.flower_footprint {
                for c in f.col..f.col + self.flower_footprint {
                    m.set(r, c, true);
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub raster: MultispectralRaster,
    pub truth: GroundTruth,
}

fn truncated_normal(rng: &mut ChaCha8Rng) -> f32 {
    loop {
        let z: f32 = StandardNormal.sample(rng);
        if z.abs() <= 4.0 {
            return z;
        }
    }
}

fn place_flowers(
    rng: &mut ChaCha8Rng,
    patch: &PatchSpec,
    id: u32,
    patch_map: &Plane<u32>,
    model: &FlowerModel,
) -> Result<Vec<Flower>> {
    let (w, h) = patch_map.dims();
    let fp = model.footprint as isize;
    let spacing = model.min_spacing.max(model.footprint + 2) as isize;
    let (r0, c0, r1, c1) = patch.bbox(w, h);
    let inside = |r: isize, c: isize| {
        r >= 0
            && c >= 0
            && (r as usize) < h
            && (c as usize) < w
            && patch_map.get(r as usize, c as usize) == id
    };
    let mut placed: Vec<Flower> = Vec::with_capacity(patch.flower_count);
    let mut attempts = 0usize;
    while placed.len() < patch.flower_count {
        attempts += 1;
        if attempts > 200 * patch.flower_count + 1000 || r1 <= r0 || c1 <= c0 {
            return Err(Error::Scene(format!(
                "could not place {} flowers in patch {id}",
                patch.flower_count
            )));
        }
        let r = rng.random_range(r0..r1) as isize;
        let c = rng.random_range(c0..c1) as isize;
        // clustered towards the patch core
        if !patch.contains(r as f64, c as f64, 0.8) {
            continue;
        }
        // footprint plus a one-pixel ring must lie on this patch's foliage
        let clear = (r - 1..=r + fp).all(|rr| (c - 1..=c + fp).all(|cc| inside(rr, cc)));
        if !clear {
            continue;
        }
        let far = placed
            .iter()
            .all(|f| (f.row as isize - r).abs().max((f.col as isize - c).abs()) >= spacing);
        if far {
            placed.push(Flower {
                patch: id,
                row: r as usize,
                col: c as usize,
            });
        }
    }
    Ok(placed)
}

/// Renders a scene. Equal specs give bit-identical rasters.
pub fn generate_scene(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let patches = spec.expanded_patches()?;
    for p in &patches {
        if p.class != LandClass::Yfi && p.flower_count > 0 {
            return Err(Error::Scene(format!(
                "{:?} patches cannot carry flowers",
                p.class
            )));
        }
    }
    let (w, h) = (spec.width, spec.height);
    let mut class_map = Plane::filled(w, h, spec.background.code());
    let mut patch_map = Plane::filled(w, h, 0u32);
    let mut class_of = vec![spec.background];
    for (i, p) in patches.iter().enumerate() {
        let id = i as u32 + 1;
        class_of.push(p.class);
        let (r0, c0, r1, c1) = p.bbox(w, h);
        for r in r0..r1 {
            for c in c0..c1 {
                if !p.contains(r as f64, c as f64, 1.0) {
                    continue;
                }
                let owner = patch_map.get(r, c);
                if owner != 0 {
                    if class_of[owner as usize] != p.class {
                        return Err(Error::Scene(format!(
                            "patch {id} ({:?}) overlaps patch {owner} ({:?})",
                            p.class, class_of[owner as usize]
                        )));
                    }
                    continue;
                }
                patch_map.set(r, c, id);
                class_map.set(r, c, p.class.code());
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut planes: Vec<Vec<f32>> = (0..4).map(|_| Vec::with_capacity(w * h)).collect();
    for r in 0..h {
        for c in 0..w {
            let owner = patch_map.get(r, c) as usize;
            let stats = spec
                .class_stats
                .get(class_of[if owner == 0 { 0 } else { owner }]);
            for (b, plane) in planes.iter_mut().enumerate() {
                let v = stats.mean[b] + stats.std[b] * truncated_normal(&mut rng);
                plane.push(v.max(0.0));
            }
        }
    }

    let mut flowers = Vec::new();
    for (i, p) in patches.iter().enumerate() {
        if p.class == LandClass::Yfi && p.flower_count > 0 {
            flowers.extend(place_flowers(
                &mut rng,
                p,
                i as u32 + 1,
                &patch_map,
                &spec.flower,
            )?);
        }
    }
    let fp = spec.flower.footprint;
    for f in &flowers {
        for r in f.row..f.row + fp {
            for c in f.col..f.col + fp {
                planes[0][r * w + c] += spec.flower.green_amplitude;
                planes[1][r * w + c] += spec.flower.red_amplitude;
            }
        }
    }

    let bands: BTreeMap<String, Plane<f32>> = MANDATORY_BANDS
        .iter()
        .zip(planes)
        .map(|(name, data)| Ok((name.to_string(), Plane::from_vec(w, h, data)?)))
        .collect::<Result<_>>()?;
    let raster = MultispectralRaster::new(bands, spec.geotransform)?;
    let yfi_mask = BinaryMask::from_plane(&class_map, |v| v == LandClass::Yfi.code());
    Ok(Scene {
        raster,
        truth: GroundTruth {
            yfi_mask,
            flower_positions: flowers,
            class_map,
            patch_map,
            patches,
            flower_footprint: fp,
        },
    })
}

/// Which iris patches become labeled knowledge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnowledgeSelector {
    All,
    /// The first `n` iris patches in spec order.
    First(usize),
    /// Explicit 1-based patch ids.
    Ids(Vec<u32>),
}

/// Stands in for the field survey: marks the selected iris patches as the
/// knowledge mask `K`.
pub fn make_knowledge_from_truth(
    truth: &GroundTruth,
    selector: &KnowledgeSelector,
    connectivity: Connectivity,
) -> Result<LabeledKnowledge> {
    let yfi = truth.patch_ids(LandClass::Yfi);
    let chosen: Vec<u32> = match selector {
        KnowledgeSelector::All => yfi,
        KnowledgeSelector::First(n) => yfi.into_iter().take(*n).collect(),
        KnowledgeSelector::Ids(ids) => {
            for id in ids {
                if !yfi.contains(id) {
                    return Err(Error::InvalidParameter(format!(
                        "patch {id} is not an iris patch"
                    )));
                }
            }
            ids.clone()
        }
    };
    let mut keep = vec![false; truth.patches.len() + 1];
    for id in chosen {
        keep[id as usize] = true;
    }
    let mask = BinaryMask::from_plane(&truth.patch_map, |v| v != 0 && keep[v as usize]);
    LabeledKnowledge::from_mask(mask, connectivity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn patch(class: LandClass, center: [f64; 2], a: f64, flowers: usize) -> PatchSpec {
        PatchSpec {
            class,
            center,
            semi_axes: [a, a],
            angle_deg: 0.0,
            flower_count: flowers,
        }
    }

    #[test]
    fn no_patches_gives_uniform_background() {
        let scene = generate_scene(&SceneSpec::new(32, 24, 3)).unwrap();
        assert!(scene.truth.yfi_mask.is_empty());
        assert!(scene.truth.flower_positions.is_empty());
        assert!(scene
            .truth
            .class_map
            .as_slice()
            .iter()
            .all(|&v| v == LandClass::Soil.code()));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let mut spec = SceneSpec::new(64, 48, 11);
        spec.patches
            .push(patch(LandClass::Yfi, [24.0, 30.0], 15.0, 6));
        let a = generate_scene(&spec).unwrap();
        let b = generate_scene(&spec).unwrap();
        assert!(a.raster.bit_eq(&b.raster));
        assert_eq!(a.truth.flower_positions, b.truth.flower_positions);
        spec.seed = 12;
        assert!(!generate_scene(&spec).unwrap().raster.bit_eq(&a.raster));
    }

    #[test]
    fn overlapping_classes_rejected() {
        let mut spec = SceneSpec::new(64, 64, 1);
        spec.patches
            .push(patch(LandClass::Yfi, [30.0, 30.0], 10.0, 0));
        spec.patches
            .push(patch(LandClass::Water, [35.0, 35.0], 10.0, 0));
        assert!(matches!(generate_scene(&spec), Err(Error::Scene(_))));
        spec.patches[1].class = LandClass::Yfi;
        assert!(generate_scene(&spec).is_ok());
    }

    #[test]
    fn flowers_on_non_iris_rejected() {
        let mut spec = SceneSpec::new(64, 64, 1);
        spec.patches
            .push(patch(LandClass::GreenVegetation, [30.0, 30.0], 10.0, 3));
        assert!(generate_scene(&spec).is_err());
    }

    #[test]
    fn overfull_patch_reports_error() {
        let mut spec = SceneSpec::new(40, 40, 1);
        spec.patches
            .push(patch(LandClass::Yfi, [20.0, 20.0], 5.0, 50));
        assert!(matches!(generate_scene(&spec), Err(Error::Scene(_))));
    }

    #[test]
    fn knowledge_selection() {
        let mut spec = SceneSpec::new(120, 40, 5);
        for i in 0..3 {
            spec.patches.push(patch(
                LandClass::Yfi,
                [20.0, 20.0 + 40.0 * i as f64],
                12.0,
                2,
            ));
        }
        let scene = generate_scene(&spec).unwrap();
        let t = &scene.truth;
        assert_eq!(
            make_knowledge_from_truth(t, &KnowledgeSelector::All, Connectivity::Eight)
                .unwrap()
                .count(),
            3
        );
        assert_eq!(
            make_knowledge_from_truth(t, &KnowledgeSelector::First(1), Connectivity::Eight)
                .unwrap()
                .count(),
            1
        );
        assert!(matches!(
            make_knowledge_from_truth(t, &KnowledgeSelector::First(0), Connectivity::Eight),
            Err(Error::EmptyKnowledge)
        ));
        assert!(make_knowledge_from_truth(
            t,
            &KnowledgeSelector::Ids(vec![9]),
            Connectivity::Eight
        )
        .is_err());
    }

    #[test]
    fn layout_respects_counts_and_spacing() {
        let spec = SceneSpec::new(1024, 1024, 9).with_layout(LayoutSpec {
            yfi_patches: 6,
            vegetation_patches: 3,
            ..Default::default()
        });
        let patches = spec.expanded_patches().unwrap();
        assert_eq!(
            patches.iter().filter(|p| p.class == LandClass::Yfi).count(),
            6
        );
        assert_eq!(
            patches
                .iter()
                .filter(|p| p.class == LandClass::GreenVegetation)
                .count(),
            3
        );
        assert_eq!(
            patches
                .iter()
                .filter(|p| p.class == LandClass::Water)
                .count(),
            1
        );
        let land: Vec<_> = patches
            .iter()
            .filter(|p| p.class != LandClass::Water)
            .collect();
        for (i, a) in land.iter().enumerate() {
            for b in &land[i + 1..] {
                let d = ((a.center[0] - b.center[0]).powi(2) + (a.center[1] - b.center[1]).powi(2))
                    .sqrt();
                assert!(
                    d - a.semi_axes[0].max(a.semi_axes[1]) - b.semi_axes[0].max(b.semi_axes[1])
                        >= 40.0
                );
            }
        }
    }

    #[test]
    fn spec_json_round_trip_with_defaults() {
        let text = r#"{"width": 50, "height": 40, "seed": 2,
            "patches": [{"class": "yfi", "center": [20, 25], "semi_axes": [10, 12], "flower_count": 3}]}"#;
        let spec: SceneSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.background, LandClass::Soil);
        assert_eq!(spec.flower, FlowerModel::default());
        let back: SceneSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }
}
