//! Flat grayscale and binary mathematical morphology.
//!
//! Every structuring element is decomposed into horizontal runs, one or
//! more per row offset. Erosion (dilation) is then the minimum (maximum)
//! over runs of a 1-D sliding-window extremum, which is computed with the
//! van Herk / Gil-Werman recurrence in constant time per sample. Min and
//! max select an input sample without rounding, so the result is
//! bit-identical to the direct offset scan whatever the evaluation order.
//!
//! Out-of-image neighbours are ignored: erosion pads with `+inf`, dilation
//! with `-inf`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Diamond,
    Square,
    Disk,
    Cross,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    shape: Shape,
    size: usize,
    offsets: Vec<(isize, isize)>,
}

impl StructuringElement {
    pub fn new(shape: Shape, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::StructuringElement("size must be at least 1".into()));
        }
        if shape != Shape::Disk && size.is_multiple_of(2) {
            return Err(Error::StructuringElement(format!(
                "{shape:?} needs an odd size to have a centre, got {size}"
            )));
        }
        let mut offsets = Vec::new();
        match shape {
            Shape::Diamond => {
                let r = (size / 2) as isize;
                for dr in -r..=r {
                    let span = r - dr.abs();
                    offsets.extend((-span..=span).map(|dc| (dr, dc)));
                }
            }
            Shape::Square => {
                let r = (size / 2) as isize;
                for dr in -r..=r {
                    offsets.extend((-r..=r).map(|dc| (dr, dc)));
                }
            }
            Shape::Cross => {
                let r = (size / 2) as isize;
                for dr in -r..=r {
                    if dr == 0 {
                        offsets.extend((-r..=r).map(|dc| (0, dc)));
                    } else {
                        offsets.push((dr, 0));
                    }
                }
            }
            Shape::Disk => {
                // radius size/2, compared in quarter units to stay integral
                let r4 = (size * size) as isize;
                let r = (size / 2) as isize;
                for dr in -r..=r {
                    for dc in -r..=r {
                        if 4 * (dr * dr + dc * dc) <= r4 {
                            offsets.push((dr, dc));
                        }
                    }
                }
            }
        }
        Ok(Self {
            shape,
            size,
            offsets,
        })
    }

    pub fn diamond(size: usize) -> Result<Self> {
        Self::new(Shape::Diamond, size)
    }

    pub fn square(size: usize) -> Result<Self> {
        Self::new(Shape::Square, size)
    }

    pub fn cross(size: usize) -> Result<Self> {
        Self::new(Shape::Cross, size)
    }

    pub fn disk(size: usize) -> Result<Self> {
        Self::new(Shape::Disk, size)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `(drow, dcol)` offsets relative to the centre, sorted row-major.
    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Horizontal runs `(col0, col1)` keyed by run, each with the row
    /// offsets that use it.
    fn runs(&self) -> BTreeMap<(isize, isize), Vec<isize>> {
        let mut by_row: BTreeMap<isize, Vec<isize>> = BTreeMap::new();
        for &(dr, dc) in &self.offsets {
            by_row.entry(dr).or_default().push(dc);
        }
        let mut runs: BTreeMap<(isize, isize), Vec<isize>> = BTreeMap::new();
        for (dr, mut cols) in by_row {
            cols.sort_unstable();
            let mut start = cols[0];
            let mut prev = cols[0];
            for &c in &cols[1..] {
                if c != prev + 1 {
                    runs.entry((start, prev)).or_default().push(dr);
                    start = c;
                }
                prev = c;
            }
            runs.entry((start, prev)).or_default().push(dr);
        }
        runs
    }
}

trait Extremum: Sync {
    const PAD: f32;
    fn pick(a: f32, b: f32) -> f32;
}

struct Min;
struct Max;

impl Extremum for Min {
    const PAD: f32 = f32::INFINITY;
    #[inline(always)]
    fn pick(a: f32, b: f32) -> f32 {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Extremum for Max {
    const PAD: f32 = f32::NEG_INFINITY;
    #[inline(always)]
    fn pick(a: f32, b: f32) -> f32 {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// Sliding extremum over windows `[c + c0, c + c1]` of one row.
///
/// `padded`, `fwd` and `bwd` are scratch buffers reused across rows.
fn row_window<E: Extremum>(
    row: &[f32],
    (c0, c1): (isize, isize),
    out: &mut [f32],
    padded: &mut Vec<f32>,
    fwd: &mut Vec<f32>,
    bwd: &mut Vec<f32>,
) {
    let n = row.len();
    let pad = c0.unsigned_abs().max(c1.unsigned_abs());
    let k = (c1 - c0 + 1) as usize;
    let m = n + 2 * pad;
    padded.clear();
    padded.resize(pad, E::PAD);
    padded.extend_from_slice(row);
    padded.resize(m, E::PAD);
    // padded[j] corresponds to column j - pad; window for column c starts at
    // c + c0 + pad
    let shift = (c0 + pad as isize) as usize;
    if k == 1 {
        out.copy_from_slice(&padded[shift..shift + n]);
        return;
    }
    fwd.clear();
    fwd.resize(m, E::PAD);
    bwd.clear();
    bwd.resize(m, E::PAD);
    for block in (0..m).step_by(k) {
        let end = (block + k).min(m);
        let mut acc = padded[block];
        fwd[block] = acc;
        for j in block + 1..end {
            acc = E::pick(acc, padded[j]);
            fwd[j] = acc;
        }
        let mut acc = padded[end - 1];
        bwd[end - 1] = acc;
        for j in (block..end - 1).rev() {
            acc = E::pick(acc, padded[j]);
            bwd[j] = acc;
        }
    }
    for (c, o) in out.iter_mut().enumerate() {
        let s = c + shift;
        *o = E::pick(bwd[s], fwd[s + k - 1]);
    }
}

fn filter<E: Extremum>(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    let (w, h) = img.dims();
    let mut out = Plane::filled(w, h, E::PAD);
    if w == 0 || h == 0 {
        return out;
    }
    let mut scratch = Plane::filled(w, h, 0.0f32);
    for ((c0, c1), drs) in se.runs() {
        let rows: &Plane<f32> = if (c0, c1) == (0, 0) {
            img
        } else {
            scratch
                .as_mut_slice()
                .par_chunks_mut(w)
                .enumerate()
                .for_each_init(
                    || (Vec::new(), Vec::new(), Vec::new()),
                    |(p, f, b), (r, dst)| row_window::<E>(img.row(r), (c0, c1), dst, p, f, b),
                );
            &scratch
        };
        out.as_mut_slice()
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(r, dst)| {
                for &dr in &drs {
                    let src = r as isize + dr;
                    if src < 0 || src >= h as isize {
                        continue;
                    }
                    for (o, &v) in dst.iter_mut().zip(rows.row(src as usize)) {
                        *o = E::pick(*o, v);
                    }
                }
            });
    }
    out
}

/// `out(p) = min over q in se of img(p + q)`, skipping out-of-image `p + q`.
pub fn erode(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    filter::<Min>(img, se)
}

/// `out(p) = max over q in se of img(p + q)`, skipping out-of-image `p + q`.
pub fn dilate(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    filter::<Max>(img, se)
}

pub fn open(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    dilate(&erode(img, se), se)
}

pub fn close(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    erode(&dilate(img, se), se)
}

/// White top-hat: `img - open(img)`, nonnegative everywhere.
pub fn top_hat(img: &Plane<f32>, se: &StructuringElement) -> Plane<f32> {
    img.zip_map(&open(img, se), |v, o| v - o)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphOp {
    Erode,
    Dilate,
    Open,
    Close,
}

/// Binary morphology: the grayscale operator on the 0/1 plane,
/// rethresholded at 0.5.
pub fn binary_morph(mask: &BinaryMask, op: MorphOp, se: &StructuringElement) -> BinaryMask {
    let plane = mask.to_plane();
    let out = match op {
        MorphOp::Erode => erode(&plane, se),
        MorphOp::Dilate => dilate(&plane, se),
        MorphOp::Open => open(&plane, se),
        MorphOp::Close => close(&plane, se),
    };
    BinaryMask::from_plane(&out, |v| v >= 0.5)
}
