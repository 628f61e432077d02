//! Learning detection parameters from the labeled knowledge mask.
//!
//! Two families of parameters come out of the labeled mask `K`:
//!
//! * per-channel value ranges of the OPEN and CLOSE maps, taken on a single
//!   reference subset as symmetric two-sided quantiles;
//! * top-hat peak thresholds for GREEN and RED, averaged over every subset,
//!   together with the flower count each subset yields at that threshold.
//!
//! Quantiles use linear interpolation between order statistics.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::morphology::{close, open, top_hat, StructuringElement};
use crate::peaks::{count_peaks_in_regions, peak_mask};
use crate::raster::{connected_components, load_mask, BinaryMask, Connectivity, RegionSet};
use crate::spectral::{Channel, FeatureStack};

/// Operator-supplied mask `K` split into its connected subsets.
#[derive(Debug, Clone)]
pub struct LabeledKnowledge {
    pub mask_k: BinaryMask,
    pub subsets: RegionSet,
}

impl LabeledKnowledge {
    pub fn from_mask(mask_k: BinaryMask, connectivity: Connectivity) -> Result<Self> {
        if mask_k.is_empty() {
            return Err(Error::EmptyKnowledge);
        }
        let subsets = connected_components(&mask_k, connectivity);
        Ok(Self { mask_k, subsets })
    }

    /// Number of labeled subsets `L`.
    pub fn count(&self) -> usize {
        self.subsets.len()
    }
}

pub fn load_knowledge(
    mask_path: impl AsRef<Path>,
    connectivity: Connectivity,
) -> Result<LabeledKnowledge> {
    LabeledKnowledge::from_mask(load_mask(mask_path)?, connectivity)
}

/// Linear-interpolation quantile of ascending `sorted` at probability `p`.
pub fn quantile(sorted: &[f32], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    let (a, b) = (sorted[lo] as f64, sorted[hi] as f64);
    if frac == 0.0 {
        a
    } else {
        a + frac * (b - a)
    }
}

fn sorted_values(plane: &crate::raster::Plane<f32>, select: &BinaryMask) -> Vec<f32> {
    let mut v: Vec<f32> = plane
        .as_slice()
        .iter()
        .zip(select.bits())
        .filter(|(_, &s)| s)
        .map(|(&x, _)| x)
        .collect();
    v.sort_unstable_by(f32::total_cmp);
    v
}

/// Value ranges of a channel's OPEN and CLOSE maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdQuad {
    pub t_open_lo: f32,
    pub t_open_hi: f32,
    pub t_close_lo: f32,
    pub t_close_hi: f32,
}

impl ThresholdQuad {
    pub fn open_range(&self) -> (f32, f32) {
        (self.t_open_lo, self.t_open_hi)
    }

    pub fn close_range(&self) -> (f32, f32) {
        (self.t_close_lo, self.t_close_hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelThresholds {
    #[serde(rename = "GREEN")]
    pub green: ThresholdQuad,
    #[serde(rename = "RED")]
    pub red: ThresholdQuad,
    #[serde(rename = "NDVI")]
    pub ndvi: ThresholdQuad,
    #[serde(rename = "CIGREEN")]
    pub cigreen: ThresholdQuad,
    #[serde(rename = "CIEDGE")]
    pub ciedge: ThresholdQuad,
}

impl ChannelThresholds {
    pub fn get(&self, c: Channel) -> &ThresholdQuad {
        match c {
            Channel::Green => &self.green,
            Channel::Red => &self.red,
            Channel::Ndvi => &self.ndvi,
            Channel::CiGreen => &self.cigreen,
            Channel::CiEdge => &self.ciedge,
        }
    }

    pub fn get_mut(&mut self, c: Channel) -> &mut ThresholdQuad {
        match c {
            Channel::Green => &mut self.green,
            Channel::Red => &mut self.red,
            Channel::Ndvi => &mut self.ndvi,
            Channel::CiGreen => &mut self.cigreen,
            Channel::CiEdge => &mut self.ciedge,
        }
    }

    fn from_array(q: [ThresholdQuad; 5]) -> Self {
        Self {
            green: q[0],
            red: q[1],
            ndvi: q[2],
            cigreen: q[3],
            ciedge: q[4],
        }
    }
}

/// Sizes of the four structuring elements the pipeline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeSpec {
    /// OPEN/CLOSE channel maps.
    pub diamond: usize,
    /// Top-hat peak extraction.
    pub cross: usize,
    /// Small-region removal on the hypothesis mask.
    pub square: usize,
    /// Neighbour merging and hole filling on the hypothesis mask.
    pub disk: usize,
}

impl Default for SeSpec {
    fn default() -> Self {
        Self {
            diamond: 15,
            cross: 3,
            square: 5,
            disk: 18,
        }
    }
}

impl SeSpec {
    pub fn diamond_se(&self) -> Result<StructuringElement> {
        StructuringElement::diamond(self.diamond)
    }

    pub fn cross_se(&self) -> Result<StructuringElement> {
        StructuringElement::cross(self.cross)
    }

    pub fn square_se(&self) -> Result<StructuringElement> {
        StructuringElement::square(self.square)
    }

    pub fn disk_se(&self) -> Result<StructuringElement> {
        StructuringElement::disk(self.disk)
    }
}

/// How a hypothesis region's peak count is compared with the calibrated minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    #[default]
    AtLeast,
    Greater,
}

impl Comparator {
    pub fn passes(self, count: u32, minimum: u32) -> bool {
        match self {
            Comparator::AtLeast => count >= minimum,
            Comparator::Greater => count > minimum,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationProfile {
    pub channels: ChannelThresholds,
    pub t_a_green: f32,
    pub t_a_red: f32,
    /// Per-subset thresholds whose means are `t_a_green` / `t_a_red`.
    pub t_green_subsets: Vec<f32>,
    pub t_red_subsets: Vec<f32>,
    pub q_green: Vec<u32>,
    pub q_red: Vec<u32>,
    pub q_min_green: u32,
    pub q_min_red: u32,
    pub se_spec: SeSpec,
    pub retention: f64,
    pub peak_fraction: f64,
    pub connectivity: Connectivity,
    pub comparator: Comparator,
    pub reference_subset: u32,
    pub reflectance_scale_note: String,
}

impl CalibrationProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Profile(m));
        for c in Channel::ALL {
            let q = self.channels.get(c);
            let all = [q.t_open_lo, q.t_open_hi, q.t_close_lo, q.t_close_hi];
            if all.iter().any(|v| !v.is_finite()) {
                return bad(format!("{} thresholds must be finite", c.name()));
            }
            if q.t_open_lo > q.t_open_hi || q.t_close_lo > q.t_close_hi {
                return bad(format!("{} thresholds out of order", c.name()));
            }
        }
        if !(self.retention > 0.0 && self.retention < 1.0) {
            return bad(format!("retention {} outside (0, 1)", self.retention));
        }
        if !(self.peak_fraction > 0.0 && self.peak_fraction < 1.0) {
            return bad(format!(
                "peak_fraction {} outside (0, 1)",
                self.peak_fraction
            ));
        }
        let l = self.q_green.len();
        if l == 0
            || self.q_red.len() != l
            || self.t_green_subsets.len() != l
            || self.t_red_subsets.len() != l
        {
            return bad("per-subset lists must be nonempty and of equal length".into());
        }
        if self.q_green.iter().min() != Some(&self.q_min_green)
            || self.q_red.iter().min() != Some(&self.q_min_red)
        {
            return bad("q_min fields must equal the minimum of the Q lists".into());
        }
        if self.reference_subset == 0 || self.reference_subset as usize > l {
            return bad(format!(
                "reference_subset {} outside 1..={l}",
                self.reference_subset
            ));
        }
        if !(self.t_a_green.is_finite() && self.t_a_red.is_finite()) {
            return bad("peak thresholds must be finite".into());
        }
        self.se_spec.diamond_se()?;
        self.se_spec.cross_se()?;
        self.se_spec.square_se()?;
        self.se_spec.disk_se()?;
        Ok(())
    }

    /// Canonical serialized bytes; identical profiles give identical bytes.
    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self).map_err(|e| Error::json("profile", e))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let profile: Self = serde_json::from_slice(bytes).map_err(|e| Error::json("profile", e))?;
        profile.validate()?;
        Ok(profile)
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn fingerprint(&self) -> String {
        let bytes = self.to_json().expect("profile serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

pub fn save_profile(profile: &CalibrationProfile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, profile.to_json()?).map_err(|e| Error::io(path, e))
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<CalibrationProfile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    CalibrationProfile::from_json(&bytes)
}

fn check_fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1), got {v}"
        )))
    }
}

/// Per-channel OPEN/CLOSE ranges over the valid pixels of `ref_subset`.
///
/// Each range keeps the central `retention` share of the map's values:
/// the bounds are the `(1 - retention) / 2` and `1 - (1 - retention) / 2`
/// quantiles.
pub fn calibrate_channel_thresholds(
    stack: &FeatureStack,
    ref_subset: &BinaryMask,
    se: &StructuringElement,
    retention: f64,
) -> Result<ChannelThresholds> {
    check_fraction("retention", retention)?;
    let select = ref_subset.and(stack.valid())?;
    if select.is_empty() {
        return Err(Error::EmptySubset);
    }
    let tail = (1.0 - retention) / 2.0;
    let quads: Vec<ThresholdQuad> = Channel::ALL
        .par_iter()
        .map(|&c| {
            let plane = stack.channel(c);
            let opened = sorted_values(&open(plane, se), &select);
            let closed = sorted_values(&close(plane, se), &select);
            ThresholdQuad {
                t_open_lo: quantile(&opened, tail) as f32,
                t_open_hi: quantile(&opened, 1.0 - tail) as f32,
                t_close_lo: quantile(&closed, tail) as f32,
                t_close_hi: quantile(&closed, 1.0 - tail) as f32,
            }
        })
        .collect();
    Ok(ChannelThresholds::from_array(
        quads.try_into().expect("five channels"),
    ))
}

/// Top-hat peak thresholds and reference flower counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakCalibration {
    pub t_green_subsets: Vec<f32>,
    pub t_red_subsets: Vec<f32>,
    pub t_a_green: f32,
    pub t_a_red: f32,
    pub q_green: Vec<u32>,
    pub q_red: Vec<u32>,
}

struct ChannelPeaks {
    per_subset: Vec<f32>,
    averaged: f32,
    counts: Vec<u32>,
}

fn calibrate_channel_peaks(
    stack: &FeatureStack,
    k: &LabeledKnowledge,
    channel: Channel,
    se: &StructuringElement,
    peak_fraction: f64,
    connectivity: Connectivity,
) -> ChannelPeaks {
    let tophat = top_hat(stack.channel(channel), se);
    let labels = &k.subsets.label_plane;
    let mut values: Vec<Vec<f32>> = vec![Vec::new(); k.count()];
    for ((&v, &l), &ok) in tophat
        .as_slice()
        .iter()
        .zip(labels.as_slice())
        .zip(stack.valid().bits())
    {
        if l != 0 && ok {
            values[(l - 1) as usize].push(v);
        }
    }
    let per_subset: Vec<f32> = values
        .into_iter()
        .map(|mut v| {
            if v.is_empty() {
                return 0.0;
            }
            v.sort_unstable_by(f32::total_cmp);
            quantile(&v, 1.0 - peak_fraction) as f32
        })
        .collect();
    let averaged =
        (per_subset.iter().map(|&t| t as f64).sum::<f64>() / per_subset.len() as f64) as f32;
    let peaks = peak_mask(&tophat, averaged, stack.valid());
    let counts = count_peaks_in_regions(&peaks, labels, k.count(), connectivity).counts;
    ChannelPeaks {
        per_subset,
        averaged,
        counts,
    }
}

/// For each subset, the `(1 - peak_fraction)` quantile of the channel's
/// top-hat response is that subset's threshold; the mean over subsets is
/// the detection threshold, and each subset's flower count is the number
/// of peak components at that threshold.
pub fn calibrate_peak_thresholds(
    stack: &FeatureStack,
    k: &LabeledKnowledge,
    se: &StructuringElement,
    peak_fraction: f64,
    connectivity: Connectivity,
) -> Result<PeakCalibration> {
    check_fraction("peak_fraction", peak_fraction)?;
    if k.count() == 0 {
        return Err(Error::EmptyKnowledge);
    }
    if k.mask_k.dims() != stack.dims() {
        return Err(Error::DimensionMismatch {
            expected: stack.dims(),
            found: k.mask_k.dims(),
        });
    }
    let (green, red) = rayon::join(
        || calibrate_channel_peaks(stack, k, Channel::Green, se, peak_fraction, connectivity),
        || calibrate_channel_peaks(stack, k, Channel::Red, se, peak_fraction, connectivity),
    );
    Ok(PeakCalibration {
        t_green_subsets: green.per_subset,
        t_red_subsets: red.per_subset,
        t_a_green: green.averaged,
        t_a_red: red.averaged,
        q_green: green.counts,
        q_red: red.counts,
    })
}

/// Picks the subset with the most GREEN flowers, breaking ties by larger
/// area and then lower id.
pub fn pick_reference(
    k: &LabeledKnowledge,
    q_green: &[u32],
    override_id: Option<u32>,
) -> Result<u32> {
    if let Some(id) = override_id {
        if id == 0 || id as usize > k.count() {
            return Err(Error::InvalidParameter(format!(
                "reference subset {id} outside 1..={}",
                k.count()
            )));
        }
        return Ok(id);
    }
    k.subsets
        .regions
        .iter()
        .max_by(|a, b| {
            let qa = q_green[(a.id - 1) as usize];
            let qb = q_green[(b.id - 1) as usize];
            qa.cmp(&qb).then(a.area.cmp(&b.area)).then(b.id.cmp(&a.id))
        })
        .map(|r| r.id)
        .ok_or(Error::EmptyKnowledge)
}

/// Reference subset for channel-range calibration: `override_id` when
/// given, otherwise the subset with the most GREEN top-hat peaks.
pub fn select_reference_subset(
    k: &LabeledKnowledge,
    stack: &FeatureStack,
    override_id: Option<u32>,
    options: &CalibrationOptions,
) -> Result<u32> {
    if override_id.is_some() {
        return pick_reference(k, &[], override_id);
    }
    let peaks = calibrate_peak_thresholds(
        stack,
        k,
        &options.se.cross_se()?,
        options.peak_fraction,
        options.connectivity,
    )?;
    pick_reference(k, &peaks.q_green, None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOptions {
    pub retention: f64,
    pub peak_fraction: f64,
    pub connectivity: Connectivity,
    pub se: SeSpec,
    pub reference_subset: Option<u32>,
    pub comparator: Comparator,
    pub reflectance_scale_note: String,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            retention: 0.95,
            peak_fraction: 0.01,
            connectivity: Connectivity::Eight,
            se: SeSpec::default(),
            reference_subset: None,
            comparator: Comparator::AtLeast,
            reflectance_scale_note: "bands used as stored; detection inputs must share this scale"
                .to_string(),
        }
    }
}

/// Runs the full calibration on one scene and its knowledge mask.
pub fn build_profile(
    stack: &FeatureStack,
    k: &LabeledKnowledge,
    options: &CalibrationOptions,
) -> Result<CalibrationProfile> {
    check_fraction("retention", options.retention)?;
    let peaks = calibrate_peak_thresholds(
        stack,
        k,
        &options.se.cross_se()?,
        options.peak_fraction,
        options.connectivity,
    )?;
    let reference = pick_reference(k, &peaks.q_green, options.reference_subset)?;
    log::info!(
        "calibrating channel ranges on subset {reference} of {}",
        k.count()
    );
    let channels = calibrate_channel_thresholds(
        stack,
        &k.subsets.region_mask(reference),
        &options.se.diamond_se()?,
        options.retention,
    )?;
    let profile = CalibrationProfile {
        channels,
        t_a_green: peaks.t_a_green,
        t_a_red: peaks.t_a_red,
        q_min_green: *peaks.q_green.iter().min().expect("L >= 1"),
        q_min_red: *peaks.q_red.iter().min().expect("L >= 1"),
        t_green_subsets: peaks.t_green_subsets,
        t_red_subsets: peaks.t_red_subsets,
        q_green: peaks.q_green,
        q_red: peaks.q_red,
        se_spec: options.se,
        retention: options.retention,
        peak_fraction: options.peak_fraction,
        connectivity: options.connectivity,
        comparator: options.comparator,
        reference_subset: reference,
        reflectance_scale_note: options.reflectance_scale_note.clone(),
    };
    profile.validate()?;
    Ok(profile)
}
