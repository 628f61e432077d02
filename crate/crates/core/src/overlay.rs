//! PNG quick-look: GREEN channel in gray with accepted-region outlines.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::detection::DetectionReport;
use crate::error::{Error, Result};
use crate::raster::Plane;

const OUTLINE: Rgb<u8> = Rgb([255, 0, 0]);

/// Linear 2%-98% stretch of the finite samples to 0..=255.
pub fn stretch_to_u8(plane: &Plane<f32>) -> Plane<u8> {
    let mut finite: Vec<f32> = plane
        .as_slice()
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    if finite.is_empty() {
        return Plane::filled(plane.width(), plane.height(), 0);
    }
    finite.sort_by(f32::total_cmp);
    let at = |p: f64| finite[((finite.len() - 1) as f64 * p).round() as usize];
    let (lo, hi) = (at(0.02), at(0.98));
    let span = if hi > lo { hi - lo } else { 1.0 };
    plane.map(|v| {
        if !v.is_finite() {
            0
        } else {
            ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        }
    })
}

pub fn render_overlay(green: &Plane<f32>, report: &DetectionReport) -> RgbImage {
    let gray = stretch_to_u8(green);
    let (w, h) = gray.dims();
    let mut img = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let g = gray.get(y as usize, x as usize);
        Rgb([g, g, g])
    });
    for d in &report.detections {
        for &[r, c] in &d.polygon {
            img.put_pixel(c as u32, r as u32, OUTLINE);
        }
    }
    img
}

pub fn save_overlay(path: &Path, green: &Plane<f32>, report: &DetectionReport) -> Result<()> {
    render_overlay(green, report)
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Image(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::{Detection, StageCounts};
    use crate::raster::BinaryMask;

    #[test]
    fn stretch_handles_constant_and_nan() {
        let p = Plane::from_vec(3, 1, vec![0.5, f32::NAN, 0.5]).unwrap();
        assert_eq!(stretch_to_u8(&p).as_slice(), &[0, 0, 0]);
        let ramp = Plane::from_fn(101, 1, |_, c| c as f32);
        let s = stretch_to_u8(&ramp);
        assert_eq!(s.get(0, 0), 0);
        assert_eq!(s.get(0, 100), 255);
    }

    #[test]
    fn outline_burned_in() {
        let green = Plane::filled(5, 4, 0.1f32);
        let report = DetectionReport {
            profile_fingerprint: String::new(),
            image_id: "t".into(),
            detections: vec![Detection {
                id: 1,
                area: 1,
                centroid: [2.0, 3.0],
                bbox: [2, 3, 2, 3],
                q_green: 1,
                q_red: 1,
                polygon: vec![[2, 3]],
                world_polygon: None,
            }],
            rejected: Vec::new(),
            stage_counts: StageCounts::default(),
            final_mask_f: BinaryMask::new(5, 4),
        };
        let img = render_overlay(&green, &report);
        assert_eq!(img.dimensions(), (5, 4));
        assert_eq!(*img.get_pixel(3, 2), OUTLINE);
        assert_eq!(*img.get_pixel(0, 0), Rgb([0, 0, 0]));
    }
}
