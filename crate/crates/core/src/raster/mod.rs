//! Raster and mask data model shared by every pipeline stage.
//!
//! Planes are stored row-major. Coordinates are `(row, col)` throughout;
//! `width` counts columns and `height` counts rows.

mod format;
mod pgm;
mod regions;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{load_raster, payload_path, save_raster, RasterHeader};
pub use pgm::{load_mask, read_pgm, save_mask, write_pgm};
pub use regions::{connected_components, label_components, Connectivity, RegionSet, RegionStats};

/// Band names every multispectral raster must carry.
pub const MANDATORY_BANDS: [&str; 4] = ["GREEN", "RED", "REDEDGE", "NIR"];

/// A dense row-major 2-D array.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Plane<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "plane of {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Plane<U> {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U: Copy, V: Copy>(&self, other: &Plane<U>, f: impl Fn(T, U) -> V) -> Plane<V> {
        assert_eq!(self.dims(), other.dims(), "plane dimensions differ");
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// A binary plane; `true` means set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn full(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "mask of {width}x{height} needs {} bits, got {}",
                width * height,
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                bits.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    /// Pixels where `pred` holds on the plane value.
    pub fn from_plane<T: Copy>(plane: &Plane<T>, pred: impl Fn(T) -> bool) -> Self {
        Self {
            width: plane.width,
            height: plane.height,
            bits: plane.data.iter().map(|&v| pred(v)).collect(),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    fn check_dims(&self, other: &BinaryMask) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    pub fn and(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a && b)
                .collect(),
        })
    }

    pub fn or(&self, other: &BinaryMask) -> Result<BinaryMask> {
        self.check_dims(other)?;
        Ok(Self {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a || b)
                .collect(),
        })
    }

    /// Number of pixels set here but not in `other`.
    pub fn count_outside(&self, other: &BinaryMask) -> Result<usize> {
        self.check_dims(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|&(&a, &b)| a && !b)
            .count())
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> Result<bool> {
        Ok(self.count_outside(other)? == 0)
    }

    /// The mask as a 0/1 float plane.
    pub fn to_plane(&self) -> Plane<f32> {
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .bits
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let width = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / width, i % width))
    }
}

/// Affine pixel-to-world mapping, in metres.
///
/// Serialized as `[origin_x, origin_y, pixel_size_x, pixel_size_y, rotation_x, rotation_y]`.
/// A pixel centre `(row, col)` maps to
/// `x = origin_x + (col + 0.5) * pixel_size_x + (row + 0.5) * rotation_x` and
/// `y = origin_y + (row + 0.5) * pixel_size_y + (col + 0.5) * rotation_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 6]", into = "[f64; 6]")]
pub struct GeoTransform {
    pub origin_x: f64,
    pub origin_y: f64,
    pub pixel_size_x: f64,
    pub pixel_size_y: f64,
    pub rotation_x: f64,
    pub rotation_y: f64,
}

impl From<[f64; 6]> for GeoTransform {
    fn from(v: [f64; 6]) -> Self {
        Self {
            origin_x: v[0],
            origin_y: v[1],
            pixel_size_x: v[2],
            pixel_size_y: v[3],
            rotation_x: v[4],
            rotation_y: v[5],
        }
    }
}

impl From<GeoTransform> for [f64; 6] {
    fn from(g: GeoTransform) -> Self {
        [
            g.origin_x,
            g.origin_y,
            g.pixel_size_x,
            g.pixel_size_y,
            g.rotation_x,
            g.rotation_y,
        ]
    }
}

impl GeoTransform {
    pub fn pixel_center(&self, row: f64, col: f64) -> (f64, f64) {
        let (r, c) = (row + 0.5, col + 0.5);
        (
            self.origin_x + c * self.pixel_size_x + r * self.rotation_x,
            self.origin_y + r * self.pixel_size_y + c * self.rotation_y,
        )
    }
}

/// Co-registered multispectral bands of one orthomosaic.
#[derive(Debug, Clone)]
pub struct MultispectralRaster {
    width: usize,
    height: usize,
    bands: BTreeMap<String, Plane<f32>>,
    nodata_mask: BinaryMask,
    geotransform: Option<GeoTransform>,
}

impl MultispectralRaster {
    /// Builds a raster and derives the validity mask: a pixel is valid when
    /// every band sample there is finite.
    pub fn new(
        bands: BTreeMap<String, Plane<f32>>,
        geotransform: Option<GeoTransform>,
    ) -> Result<Self> {
        let (width, height) = bands.values().next().ok_or(Error::NoBands)?.dims();
        for plane in bands.values() {
            if plane.dims() != (width, height) {
                return Err(Error::DimensionMismatch {
                    expected: (width, height),
                    found: plane.dims(),
                });
            }
        }
        for name in MANDATORY_BANDS {
            if !bands.contains_key(name) {
                return Err(Error::MissingBand(name.to_string()));
            }
        }
        let mut valid = vec![true; width * height];
        for plane in bands.values() {
            for (v, s) in valid.iter_mut().zip(plane.as_slice()) {
                *v &= s.is_finite();
            }
        }
        Ok(Self {
            width,
            height,
            bands,
            nodata_mask: BinaryMask::from_bits(width, height, valid)?,
            geotransform,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn band(&self, name: &str) -> Result<&Plane<f32>> {
        self.bands
            .get(name)
            .ok_or_else(|| Error::MissingBand(name.to_string()))
    }

    pub fn bands(&self) -> &BTreeMap<String, Plane<f32>> {
        &self.bands
    }

    /// Validity mask; `true` marks pixels whose samples are all finite.
    pub fn nodata_mask(&self) -> &BinaryMask {
        &self.nodata_mask
    }

    pub fn geotransform(&self) -> Option<&GeoTransform> {
        self.geotransform.as_ref()
    }

    /// Bitwise equality of every band payload plus metadata.
    pub fn bit_eq(&self, other: &MultispectralRaster) -> bool {
        self.dims() == other.dims()
            && self.geotransform == other.geotransform
            && self.bands.len() == other.bands.len()
            && self
                .bands
                .iter()
                .zip(&other.bands)
                .all(|((na, a), (nb, b))| {
                    na == nb
                        && a.as_slice()
                            .iter()
                            .zip(b.as_slice())
                            .all(|(x, y)| x.to_bits() == y.to_bits())
                })
    }
}
