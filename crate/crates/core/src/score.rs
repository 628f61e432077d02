//! Region-level scoring of a detection mask against ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{connected_components, BinaryMask, Connectivity};

/// Fraction of a truth patch an accepted region must cover for the patch to
/// count as detected.
pub const DETECTION_OVERLAP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchScore {
    pub id: u32,
    pub area: usize,
    /// Largest fraction of the patch covered by a single accepted region.
    pub best_overlap: f64,
    pub iou: f64,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub truth_patches: usize,
    pub detected_patches: usize,
    pub accepted_regions: usize,
    pub true_regions: usize,
    pub recall: Option<f64>,
    /// `None` when nothing was accepted.
    pub precision: Option<f64>,
    pub pixel_iou: Option<f64>,
    pub patches: Vec<PatchScore>,
}

/// Scores accepted regions (components of `detected`) against truth patches
/// (components of `truth`).
///
/// A truth patch is detected when one accepted region overlaps at least half
/// of it. An accepted region is a true positive when it touches any truth
/// pixel.
pub fn score_masks(
    detected: &BinaryMask,
    truth: &BinaryMask,
    connectivity: Connectivity,
) -> Result<Metrics> {
    if detected.dims() != truth.dims() {
        return Err(Error::DimensionMismatch {
            expected: truth.dims(),
            found: detected.dims(),
        });
    }
    let det = connected_components(detected, connectivity);
    let tru = connected_components(truth, connectivity);
    let (nd, nt) = (det.len(), tru.len());

    // overlap[t][d] in pixels, dense since scene region counts are small
    let mut overlap = vec![vec![0usize; nd + 1]; nt + 1];
    for (&t, &d) in tru
        .label_plane
        .as_slice()
        .iter()
        .zip(det.label_plane.as_slice())
    {
        if t != 0 || d != 0 {
            overlap[t as usize][d as usize] += 1;
        }
    }

    let mut patches = Vec::with_capacity(nt);
    for (t, row) in overlap.iter().enumerate().skip(1) {
        let area = tru.regions[t - 1].area;
        let (mut best, mut best_iou) = (0usize, 0.0);
        for (d, &inter) in row.iter().enumerate().skip(1) {
            if inter == 0 {
                continue;
            }
            best = best.max(inter);
            let union = area + det.regions[d - 1].area - inter;
            best_iou = f64::max(best_iou, inter as f64 / union as f64);
        }
        let best_overlap = best as f64 / area as f64;
        patches.push(PatchScore {
            id: t as u32,
            area,
            best_overlap,
            iou: best_iou,
            detected: best_overlap >= DETECTION_OVERLAP,
        });
    }
    let detected_patches = patches.iter().filter(|p| p.detected).count();
    let true_regions = (1..=nd)
        .filter(|&d| (1..=nt).any(|t| overlap[t][d] > 0))
        .count();
    let inter = detected
        .bits()
        .iter()
        .zip(truth.bits())
        .filter(|(a, b)| **a && **b)
        .count();
    let union = detected
        .bits()
        .iter()
        .zip(truth.bits())
        .filter(|(a, b)| **a || **b)
        .count();
    Ok(Metrics {
        truth_patches: nt,
        detected_patches,
        accepted_regions: nd,
        true_regions,
        recall: (nt > 0).then(|| detected_patches as f64 / nt as f64),
        precision: (nd > 0).then(|| true_regions as f64 / nd as f64),
        pixel_iou: (union > 0).then(|| inter as f64 / union as f64),
        patches,
    })
}
