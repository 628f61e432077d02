//! Portable raster format: a JSON header plus one raw little-endian `f32`
//! row-major payload per band.
//!
//! For a header at `dir/scene.json` the band payloads live at
//! `dir/scene.<BAND>.raw`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GeoTransform, MultispectralRaster, Plane};
use crate::error::{Error, Result};

const DTYPE: &str = "f32le";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RasterHeader {
    pub width: usize,
    pub height: usize,
    pub bands: Vec<String>,
    pub dtype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geotransform: Option<GeoTransform>,
}

/// Location of the payload file for `band`, next to the header.
pub fn payload_path(header_path: &Path, band: &str) -> PathBuf {
    let stem = header_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    header_path.with_file_name(format!("{stem}.{band}.raw"))
}

pub fn load_raster(path: impl AsRef<Path>) -> Result<MultispectralRaster> {
    let path = path.as_ref();
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    let header: RasterHeader =
        serde_json::from_slice(&text).map_err(|e| Error::json(path.display().to_string(), e))?;
    if header.dtype != DTYPE {
        return Err(Error::Header(format!(
            "unsupported dtype {:?}, expected {DTYPE:?}",
            header.dtype
        )));
    }
    if header.bands.is_empty() {
        return Err(Error::NoBands);
    }
    let expected = header.width * header.height * 4;
    let mut bands = BTreeMap::new();
    for name in &header.bands {
        let payload = payload_path(path, name);
        let bytes = match fs::read(&payload) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(Error::io(payload, e)),
        };
        if bytes.len() != expected {
            return Err(Error::PayloadSize {
                band: name.clone(),
                expected,
                actual: bytes.len(),
            });
        }
        let samples = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if bands
            .insert(
                name.clone(),
                Plane::from_vec(header.width, header.height, samples)?,
            )
            .is_some()
        {
            return Err(Error::Header(format!("band {name} listed twice")));
        }
    }
    MultispectralRaster::new(bands, header.geotransform)
}

pub fn save_raster(raster: &MultispectralRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if raster.bands().is_empty() {
        return Err(Error::NoBands);
    }
    let header = RasterHeader {
        width: raster.width(),
        height: raster.height(),
        bands: raster.bands().keys().cloned().collect(),
        dtype: DTYPE.to_string(),
        geotransform: raster.geotransform().copied(),
    };
    let mut text =
        serde_json::to_vec_pretty(&header).map_err(|e| Error::json("raster header", e))?;
    text.push(b'\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    for (name, plane) in raster.bands() {
        let bytes: Vec<u8> = plane
            .as_slice()
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let payload = payload_path(path, name);
        fs::write(&payload, bytes).map_err(|e| Error::io(payload, e))?;
    }
    Ok(())
}
