//! Applying a calibration profile to a scene.
//!
//! Stages: binarize the OPEN/CLOSE maps of every channel against the
//! calibrated ranges, intersect the ten masks into the raw hypothesis mask,
//! clean and merge it with binary morphology, count top-hat flower peaks
//! inside each hypothesis region, and keep the regions whose GREEN and RED
//! counts both reach the calibrated minimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationProfile;
use crate::error::{Error, Result};
use crate::morphology::{binary_morph, close, open, top_hat, MorphOp};
use crate::peaks::{count_peaks_in_regions, peak_mask};
use crate::raster::{connected_components, label_components, BinaryMask, Plane, RegionSet};
use crate::spectral::{Channel, FeatureStack};

/// Per-channel binarizations, indexed in [`Channel::ALL`] order.
#[derive(Debug, Clone)]
pub struct ChannelMasks {
    pub open: Vec<BinaryMask>,
    pub close: Vec<BinaryMask>,
}

impl ChannelMasks {
    pub fn open_mask(&self, c: Channel) -> &BinaryMask {
        &self.open[c.index()]
    }

    pub fn close_mask(&self, c: Channel) -> &BinaryMask {
        &self.close[c.index()]
    }

    /// All ten masks, OPEN masks first.
    pub fn all(&self) -> impl Iterator<Item = &BinaryMask> {
        self.open.iter().chain(&self.close)
    }
}

fn in_range(map: &Plane<f32>, (lo, hi): (f32, f32), valid: &BinaryMask) -> BinaryMask {
    let bits = map
        .as_slice()
        .iter()
        .zip(valid.bits())
        .map(|(&v, &ok)| ok && v >= lo && v <= hi)
        .collect();
    BinaryMask::from_bits(map.width(), map.height(), bits).expect("dims match map")
}

/// Thresholds the OPEN and CLOSE map of each channel with its calibrated
/// range. Invalid pixels are clear in every mask.
pub fn binarize_channels(
    stack: &FeatureStack,
    profile: &CalibrationProfile,
) -> Result<ChannelMasks> {
    let se = profile.se_spec.diamond_se()?;
    let (open, close): (Vec<_>, Vec<_>) = Channel::ALL
        .par_iter()
        .map(|&c| {
            let plane = stack.channel(c);
            let t = profile.channels.get(c);
            (
                in_range(&open(plane, &se), t.open_range(), stack.valid()),
                in_range(&close(plane, &se), t.close_range(), stack.valid()),
            )
        })
        .unzip();
    Ok(ChannelMasks { open, close })
}

/// Intersection of every mask.
pub fn intersect_masks<'a>(masks: impl IntoIterator<Item = &'a BinaryMask>) -> Result<BinaryMask> {
    let mut iter = masks.into_iter();
    let mut acc = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("no masks to intersect".into()))?
        .clone();
    for m in iter {
        acc = acc.and(m)?;
    }
    Ok(acc)
}

/// Raw hypothesis mask: the intersection of all OPEN masks with all CLOSE
/// masks.
pub fn build_hypothesis_mask(masks: &ChannelMasks) -> Result<BinaryMask> {
    let b_open = intersect_masks(&masks.open)?;
    let b_close = intersect_masks(&masks.close)?;
    b_open.and(&b_close)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StageCounts {
    pub raw: usize,
    pub after_open5: usize,
    pub after_dilate_close18: usize,
}

#[derive(Debug, Clone)]
pub struct HypothesisSet {
    pub mask_h: BinaryMask,
    pub regions: RegionSet,
    pub stage_counts: StageCounts,
}

/// Opens the raw mask with the square element to drop small and thin
/// regions, then dilates and closes it with the disk element to merge
/// neighbours and fill holes.
pub fn refine_regions(h0: &BinaryMask, profile: &CalibrationProfile) -> Result<HypothesisSet> {
    let conn = profile.connectivity;
    let square = profile.se_spec.square_se()?;
    let disk = profile.se_spec.disk_se()?;
    let raw = label_components(h0, conn).1 as usize;
    let opened = binary_morph(h0, MorphOp::Open, &square);
    let after_open5 = label_components(&opened, conn).1 as usize;
    let merged = binary_morph(
        &binary_morph(&opened, MorphOp::Dilate, &disk),
        MorphOp::Close,
        &disk,
    );
    let regions = connected_components(&merged, conn);
    log::debug!(
        "hypothesis regions: {raw} raw, {after_open5} after open, {} after merge",
        regions.len()
    );
    Ok(HypothesisSet {
        stage_counts: StageCounts {
            raw,
            after_open5,
            after_dilate_close18: regions.len(),
        },
        mask_h: merged,
        regions,
    })
}

/// Flower peaks per hypothesis region, index `id - 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    pub q_green: Vec<u32>,
    pub q_red: Vec<u32>,
    pub positions_green: Vec<Vec<(f64, f64)>>,
    pub positions_red: Vec<Vec<(f64, f64)>>,
}

pub fn count_region_peaks(
    stack: &FeatureStack,
    regions: &RegionSet,
    profile: &CalibrationProfile,
) -> Result<PeakSet> {
    if regions.label_plane.dims() != stack.dims() {
        return Err(Error::DimensionMismatch {
            expected: stack.dims(),
            found: regions.label_plane.dims(),
        });
    }
    let se = profile.se_spec.cross_se()?;
    let count = |c: Channel, threshold: f32| {
        let th = top_hat(stack.channel(c), &se);
        let peaks = peak_mask(&th, threshold, stack.valid());
        count_peaks_in_regions(
            &peaks,
            &regions.label_plane,
            regions.len(),
            profile.connectivity,
        )
    };
    let (green, red) = rayon::join(
        || count(Channel::Green, profile.t_a_green),
        || count(Channel::Red, profile.t_a_red),
    );
    Ok(PeakSet {
        q_green: green.counts,
        q_red: red.counts,
        positions_green: green.positions,
        positions_red: red.positions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub id: u32,
    pub area: usize,
    /// `(row, col)`.
    pub centroid: [f64; 2],
    /// Inclusive `(row0, col0, row1, col1)`.
    pub bbox: [usize; 4],
    pub q_green: u32,
    pub q_red: u32,
    /// Boundary pixels `(row, col)`, clockwise.
    pub polygon: Vec<[usize; 2]>,
    /// Boundary pixel centres `(x, y)` in world units.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub world_polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    InsufficientPeaks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: u32,
    pub reason: RejectReason,
    pub q_green: u32,
    pub q_red: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub profile_fingerprint: String,
    pub image_id: String,
    pub detections: Vec<Detection>,
    pub rejected: Vec<Rejection>,
    pub stage_counts: StageCounts,
    /// Union of the accepted regions; written separately as a PGM.
    #[serde(skip)]
    pub final_mask_f: BinaryMask,
}

impl DetectionReport {
    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(self).map_err(|e| Error::json("report", e))?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Accepts region `h_j` when both its GREEN and RED peak counts pass the
/// profile's comparator against the calibrated minima.
pub fn validate_regions(
    hyp: &HypothesisSet,
    peaks: &PeakSet,
    profile: &CalibrationProfile,
    geotransform: Option<&crate::raster::GeoTransform>,
) -> Result<DetectionReport> {
    let n = hyp.regions.len();
    if peaks.q_green.len() != n || peaks.q_red.len() != n {
        return Err(Error::InvalidParameter(format!(
            "peak counts cover {} regions, expected {n}",
            peaks.q_green.len().min(peaks.q_red.len())
        )));
    }
    let mut detections = Vec::new();
    let mut rejected = Vec::new();
    let mut accepted = Vec::new();
    for region in &hyp.regions.regions {
        let i = (region.id - 1) as usize;
        let (qg, qr) = (peaks.q_green[i], peaks.q_red[i]);
        let ok = profile.comparator.passes(qg, profile.q_min_green)
            && profile.comparator.passes(qr, profile.q_min_red);
        if !ok {
            rejected.push(Rejection {
                id: region.id,
                reason: RejectReason::InsufficientPeaks,
                q_green: qg,
                q_red: qr,
            });
            continue;
        }
        accepted.push(region.id);
        let (r0, c0, r1, c1) = region.bbox;
        detections.push(Detection {
            id: region.id,
            area: region.area,
            centroid: [region.centroid.0, region.centroid.1],
            bbox: [r0, c0, r1, c1],
            q_green: qg,
            q_red: qr,
            polygon: region.boundary.iter().map(|&(r, c)| [r, c]).collect(),
            world_polygon: geotransform.map(|g| {
                region
                    .boundary
                    .iter()
                    .map(|&(r, c)| {
                        let (x, y) = g.pixel_center(r as f64, c as f64);
                        [x, y]
                    })
                    .collect()
            }),
        });
    }
    Ok(DetectionReport {
        profile_fingerprint: profile.fingerprint(),
        image_id: String::new(),
        detections,
        rejected,
        stage_counts: hyp.stage_counts,
        final_mask_f: hyp.regions.union_mask(&accepted),
    })
}

/// Intermediate products of one detection run.
#[derive(Debug, Clone)]
pub struct DetectionTrace {
    pub channel_masks: ChannelMasks,
    pub h0: BinaryMask,
    pub hypotheses: HypothesisSet,
    pub peaks: PeakSet,
}

pub fn detect_traced(
    stack: &FeatureStack,
    profile: &CalibrationProfile,
) -> Result<(DetectionReport, DetectionTrace)> {
    profile.validate()?;
    let channel_masks = binarize_channels(stack, profile)?;
    let h0 = build_hypothesis_mask(&channel_masks)?;
    let hypotheses = refine_regions(&h0, profile)?;
    let peaks = count_region_peaks(stack, &hypotheses.regions, profile)?;
    let report = validate_regions(&hypotheses, &peaks, profile, stack.geotransform())?;
    Ok((
        report,
        DetectionTrace {
            channel_masks,
            h0,
            hypotheses,
            peaks,
        },
    ))
}

pub fn detect(stack: &FeatureStack, profile: &CalibrationProfile) -> Result<DetectionReport> {
    detect_traced(stack, profile).map(|(report, _)| report)
}
