//! Flower-peak extraction from top-hat filtered channels.
//!
//! A flower is a connected component of pixels whose top-hat response
//! reaches the peak threshold. A zero response never counts, so a flat
//! channel has no flowers even when the threshold is zero.

use crate::raster::{label_components, BinaryMask, Connectivity, Plane};

pub fn peak_mask(tophat: &Plane<f32>, threshold: f32, valid: &BinaryMask) -> BinaryMask {
    let bits = tophat
        .as_slice()
        .iter()
        .zip(valid.bits())
        .map(|(&v, &ok)| ok && v > 0.0 && v >= threshold)
        .collect();
    BinaryMask::from_bits(tophat.width(), tophat.height(), bits).expect("dims match tophat")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionPeaks {
    /// Peak components per region, index `id - 1`.
    pub counts: Vec<u32>,
    /// Centroid `(row, col)` of each peak component, per region.
    pub positions: Vec<Vec<(f64, f64)>>,
}

/// Counts peak components inside each labeled region.
///
/// Components are formed after clipping `peaks` to the regions, so a peak
/// straddling a region border only counts its inside part. Regions must be
/// components under the same `connectivity`, which keeps every clipped
/// peak component inside a single region.
pub fn count_peaks_in_regions(
    peaks: &BinaryMask,
    region_labels: &Plane<u32>,
    region_count: usize,
    connectivity: Connectivity,
) -> RegionPeaks {
    let (w, h) = peaks.dims();
    let clipped = BinaryMask::from_fn(w, h, |r, c| peaks.get(r, c) && region_labels.get(r, c) != 0);
    let (labels, n) = label_components(&clipped, connectivity);
    let n = n as usize;
    let mut owner = vec![0u32; n];
    let mut sums = vec![(0u64, 0u64, 0u64); n];
    for (i, &l) in labels.as_slice().iter().enumerate() {
        if l == 0 {
            continue;
        }
        let k = (l - 1) as usize;
        let (r, c) = (i / w, i % w);
        owner[k] = region_labels.get(r, c);
        sums[k].0 += r as u64;
        sums[k].1 += c as u64;
        sums[k].2 += 1;
    }
    let mut out = RegionPeaks {
        counts: vec![0; region_count],
        positions: vec![Vec::new(); region_count],
    };
    for (k, &region) in owner.iter().enumerate() {
        let slot = (region - 1) as usize;
        let (sr, sc, a) = sums[k];
        out.counts[slot] += 1;
        out.positions[slot].push((sr as f64 / a as f64, sc as f64 / a as f64));
    }
    out
}
