#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yfi_core::morphology::StructuringElement;
use yfi_core::raster::{BinaryMask, Connectivity, Plane};

/// Direct offset scan. Offsets falling outside the image are skipped.
pub fn scan(img: &Plane<f32>, se: &StructuringElement, take_max: bool) -> Plane<f32> {
    let (w, h) = img.dims();
    Plane::from_fn(w, h, |r, c| {
        let mut acc = if take_max {
            f32::NEG_INFINITY
        } else {
            f32::INFINITY
        };
        for &(dr, dc) in se.offsets() {
            let (rr, cc) = (r as isize + dr, c as isize + dc);
            if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                continue;
            }
            let v = img.get(rr as usize, cc as usize);
            if (take_max && v > acc) || (!take_max && v < acc) {
                acc = v;
            }
        }
        acc
    })
}

pub fn erode(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    scan(img, se, false)
}

pub fn dilate(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    scan(img, se, true)
}

pub fn open(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    dilate(&erode(img, se), se)
}

pub fn close(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    erode(&dilate(img, se), se)
}

pub fn top_hat(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    img.zip_map(&open(img, se), |a, b| a - b)
}

/// Uniform samples in `[0, 1)`; odd seeds are quantized to eight levels so
/// that ties are common.
pub fn random_plane(seed: u64, w: usize, h: usize) -> Plane<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quantize = seed % 2 == 1;
    Plane::from_fn(w, h, |_, _| {
        let v: f32 = rng.random();
        if quantize {
            (v * 8.0).floor() / 8.0
        } else {
            v
        }
    })
}

pub fn bits_equal(a: &Plane<f32>, b: &Plane<f32>) -> bool {
    a.dims() == b.dims()
        && a.as_slice()
            .iter()
            .zip(b.as_slice())
            .all(|(x, y)| x.to_bits() == y.to_bits())
}

fn neighbours(connectivity: Connectivity) -> &'static [(isize, isize)] {
    match connectivity {
        Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        Connectivity::Eight => &[
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ],
    }
}

/// Flood-fill labelling. Components are numbered from 1 in scan order of
/// their first pixel.
pub fn flood_fill_labels(mask: &BinaryMask, connectivity: Connectivity) -> (Vec<u32>, u32) {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (r, c) = ((i / w) as isize, (i % w) as isize);
            for &(dr, dc) in neighbours(connectivity) {
                let (rr, cc) = (r + dr, c + dc);
                if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                    continue;
                }
                let j = rr as usize * w + cc as usize;
                if mask.bits()[j] && labels[j] == 0 {
                    labels[j] = next;
                    stack.push(j);
                }
            }
        }
    }
    (labels, next)
}

/// Pixels exceeding every in-image pixel at Chebyshev distance 2 by at
/// least `margin`, grouped into 8-connected clusters.
pub fn count_local_peaks(img: &Plane<f32>, margin: f32, within: &BinaryMask) -> u32 {
    let (w, h) = img.dims();
    let peak = BinaryMask::from_fn(w, h, |r, c| {
        if !within.get(r, c) {
            return false;
        }
        let v = img.get(r, c);
        // a 2x2 footprint shares its top value with neighbours, so compare
        // against the ring around the pixel's 2x2 block as well
        let mut ring_max = f32::NEG_INFINITY;
        for dr in -2isize..=2 {
            for dc in -2isize..=2 {
                let (rr, cc) = (r as isize + dr, c as isize + dc);
                if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                    continue;
                }
                let u = img.get(rr as usize, cc as usize);
                if (dr.abs() == 2 || dc.abs() == 2) && u > ring_max {
                    ring_max = u;
                }
            }
        }
        v >= ring_max + margin
    });
    flood_fill_labels(&peak, Connectivity::Eight).1
}
