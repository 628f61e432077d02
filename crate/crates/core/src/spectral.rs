//! The five detection channels derived from a multispectral raster.
//!
//! Pixels where an index is undefined (zero denominator) or where any input
//! is nodata are dropped from the stack's validity mask; their channel
//! samples are stored as `0.0` so downstream morphology never sees NaN.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::raster::{BinaryMask, GeoTransform, MultispectralRaster, Plane};

/// Fill value for channel samples at invalid pixels.
pub const INVALID_FILL: f32 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "GREEN")]
    Green,
    #[serde(rename = "RED")]
    Red,
    #[serde(rename = "NDVI")]
    Ndvi,
    #[serde(rename = "CIGREEN")]
    CiGreen,
    #[serde(rename = "CIEDGE")]
    CiEdge,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::Green,
        Channel::Red,
        Channel::Ndvi,
        Channel::CiGreen,
        Channel::CiEdge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Green => "GREEN",
            Channel::Red => "RED",
            Channel::Ndvi => "NDVI",
            Channel::CiGreen => "CIGREEN",
            Channel::CiEdge => "CIEDGE",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// A derived index plane with its own definedness mask.
#[derive(Debug, Clone)]
pub struct IndexPlane {
    pub values: Plane<f32>,
    pub defined: BinaryMask,
}

fn index_plane(a: &Plane<f32>, b: &Plane<f32>, f: impl Fn(f32, f32) -> Option<f32>) -> IndexPlane {
    let raw = a.zip_map(b, |x, y| f(x, y).filter(|v| v.is_finite()));
    IndexPlane {
        defined: BinaryMask::from_plane(&raw, |v| v.is_some()),
        values: raw.map(|v| v.unwrap_or(INVALID_FILL)),
    }
}

/// `(NIR - RED) / (NIR + RED)`.
pub fn ndvi(nir: &Plane<f32>, red: &Plane<f32>) -> IndexPlane {
    index_plane(nir, red, |n, r| {
        let den = n + r;
        (den != 0.0).then(|| (n - r) / den)
    })
}

/// `NIR / GREEN - 1`.
pub fn ci_green(nir: &Plane<f32>, green: &Plane<f32>) -> IndexPlane {
    index_plane(nir, green, |n, g| (g != 0.0).then(|| n / g - 1.0))
}

/// `NIR / REDEDGE - 1`.
pub fn ci_edge(nir: &Plane<f32>, rededge: &Plane<f32>) -> IndexPlane {
    index_plane(nir, rededge, |n, e| (e != 0.0).then(|| n / e - 1.0))
}

#[derive(Debug, Clone)]
pub struct FeatureStack {
    channels: [Plane<f32>; 5],
    valid: BinaryMask,
    geotransform: Option<GeoTransform>,
}

impl FeatureStack {
    /// Assembles a stack from channel planes in [`Channel::ALL`] order.
    /// Samples at invalid pixels are replaced by [`INVALID_FILL`].
    pub fn from_channels(
        channels: [Plane<f32>; 5],
        valid: BinaryMask,
        geotransform: Option<GeoTransform>,
    ) -> Result<Self> {
        for plane in &channels {
            if plane.dims() != valid.dims() {
                return Err(crate::Error::DimensionMismatch {
                    expected: valid.dims(),
                    found: plane.dims(),
                });
            }
        }
        let channels = channels.map(|p| {
            let mut p = p;
            for (v, &ok) in p.as_mut_slice().iter_mut().zip(valid.bits()) {
                if !ok {
                    *v = INVALID_FILL;
                }
            }
            p
        });
        Ok(Self {
            channels,
            valid,
            geotransform,
        })
    }

    pub fn channel(&self, c: Channel) -> &Plane<f32> {
        &self.channels[c.index()]
    }

    pub fn valid(&self) -> &BinaryMask {
        &self.valid
    }

    pub fn dims(&self) -> (usize, usize) {
        self.valid.dims()
    }

    pub fn geotransform(&self) -> Option<&GeoTransform> {
        self.geotransform.as_ref()
    }

    /// Copy with `delta` added to one channel at valid pixels.
    pub fn shifted(&self, channel: Channel, delta: f32) -> FeatureStack {
        let mut out = self.clone();
        let plane = &mut out.channels[channel.index()];
        for (v, &ok) in plane.as_mut_slice().iter_mut().zip(self.valid.bits()) {
            if ok {
                *v += delta;
            }
        }
        out
    }
}

pub fn build_stack(raster: &MultispectralRaster) -> Result<FeatureStack> {
    let green = raster.band("GREEN")?;
    let red = raster.band("RED")?;
    let rededge = raster.band("REDEDGE")?;
    let nir = raster.band("NIR")?;

    let ndvi = ndvi(nir, red);
    let cig = ci_green(nir, green);
    let cie = ci_edge(nir, rededge);
    let valid = raster
        .nodata_mask()
        .and(&ndvi.defined)?
        .and(&cig.defined)?
        .and(&cie.defined)?;

    FeatureStack::from_channels(
        [
            green.clone(),
            red.clone(),
            ndvi.values,
            cig.values,
            cie.values,
        ],
        valid,
        raster.geotransform().copied(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::MANDATORY_BANDS;
    use std::collections::BTreeMap;

    fn px(v: f32) -> Plane<f32> {
        Plane::filled(1, 1, v)
    }

    #[test]
    fn ndvi_scalar_cases() {
        assert_eq!(ndvi(&px(0.3), &px(0.3)).values.get(0, 0), 0.0);
        let v = ndvi(&px(0.5), &px(0.1)).values.get(0, 0);
        assert!((v - 0.666_666_7).abs() < 1e-6);
        let z = ndvi(&px(0.0), &px(0.0));
        assert!(!z.defined.get(0, 0));
        assert_eq!(z.values.get(0, 0), INVALID_FILL);
    }

    #[test]
    fn chlorophyll_indices_scalar_cases() {
        assert_eq!(ci_green(&px(0.4), &px(0.4)).values.get(0, 0), 0.0);
        let v = ci_green(&px(0.6), &px(0.2)).values.get(0, 0);
        assert!((v - 2.0).abs() < 1e-6);
        assert!(!ci_green(&px(0.6), &px(0.0)).defined.get(0, 0));
        assert!(!ci_edge(&px(0.6), &px(0.0)).defined.get(0, 0));
        assert_eq!(ci_edge(&px(0.2), &px(0.2)).values.get(0, 0), 0.0);
    }

    fn raster_of(f: impl Fn(&str) -> Plane<f32>) -> MultispectralRaster {
        let bands: BTreeMap<_, _> = MANDATORY_BANDS
            .iter()
            .map(|n| (n.to_string(), f(n)))
            .collect();
        MultispectralRaster::new(bands, None).unwrap()
    }

    #[test]
    fn uniform_raster_gives_zero_indices() {
        let stack = build_stack(&raster_of(|_| Plane::filled(4, 3, 0.5))).unwrap();
        for c in [Channel::Ndvi, Channel::CiGreen, Channel::CiEdge] {
            assert!(stack.channel(c).as_slice().iter().all(|&v| v == 0.0));
        }
        assert_eq!(stack.channel(Channel::Green).get(1, 1), 0.5);
        assert_eq!(stack.valid().count(), 12);
    }

    #[test]
    fn nan_nir_invalidates_every_channel() {
        let stack = build_stack(&raster_of(|n| {
            let mut p = Plane::filled(3, 3, 0.5);
            if n == "NIR" {
                p.set(1, 2, f32::NAN);
            }
            p
        }))
        .unwrap();
        assert!(!stack.valid().get(1, 2));
        assert_eq!(stack.valid().count(), 8);
        for c in Channel::ALL {
            assert!(stack.channel(c).get(1, 2).is_finite());
        }
    }

    #[test]
    fn zero_rededge_invalidates_only_that_pixel() {
        let stack = build_stack(&raster_of(|n| {
            let mut p = Plane::filled(2, 2, 0.3);
            if n == "REDEDGE" {
                p.set(0, 0, 0.0);
            }
            p
        }))
        .unwrap();
        assert!(!stack.valid().get(0, 0));
        assert_eq!(stack.valid().count(), 3);
    }

    #[test]
    fn channel_names_serialize_upper_case() {
        assert_eq!(
            serde_json::to_string(&Channel::CiEdge).unwrap(),
            "\"CIEDGE\""
        );
    }
}
