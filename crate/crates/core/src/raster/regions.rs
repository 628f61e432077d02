//! Connected-component labeling and per-region statistics.
//!
//! Labeling is the classic two-pass scheme with a union-find forest.
//! Final ids are assigned in raster-scan order of each component's
//! topmost-leftmost pixel, so they are contiguous and independent of the
//! union order.

use serde::{Deserialize, Serialize};

use super::{BinaryMask, Plane};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self, Error> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(Error::InvalidParameter(format!(
                "connectivity must be 4 or 8, got {other}"
            ))),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats {
    pub id: u32,
    pub area: usize,
    /// Inclusive `(row0, col0, row1, col1)`.
    pub bbox: (usize, usize, usize, usize),
    pub centroid: (f64, f64),
    /// Outer boundary pixels, clockwise from the topmost-leftmost pixel.
    pub boundary: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct RegionSet {
    /// 0 is background, `k` is region `k`.
    pub label_plane: Plane<u32>,
    pub regions: Vec<RegionStats>,
}

impl RegionSet {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&RegionStats> {
        id.checked_sub(1).and_then(|i| self.regions.get(i as usize))
    }

    /// Mask of a single region's pixels.
    pub fn region_mask(&self, id: u32) -> BinaryMask {
        BinaryMask::from_plane(&self.label_plane, |l| l == id)
    }

    /// Mask of the union of the listed regions.
    pub fn union_mask(&self, ids: &[u32]) -> BinaryMask {
        let mut keep = vec![false; self.regions.len() + 1];
        for &id in ids {
            if let Some(slot) = keep.get_mut(id as usize) {
                *slot = true;
            }
        }
        BinaryMask::from_plane(&self.label_plane, |l| l != 0 && keep[l as usize])
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let grand = parent[parent[x as usize] as usize];
        parent[x as usize] = grand;
        x = grand;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let (ra, rb) = (find(parent, a), find(parent, b));
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Labels the connected components of `mask`, returning the label plane and
/// the number of components.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> (Plane<u32>, u32) {
    let (w, h) = mask.dims();
    let bits = mask.bits();
    let mut labels = vec![0u32; w * h];
    // parent[0] is the background sentinel
    let mut parent: Vec<u32> = vec![0];

    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if !bits[i] {
                continue;
            }
            let mut neighbors = [0u32; 4];
            let mut n = 0;
            if c > 0 && labels[i - 1] != 0 {
                neighbors[n] = labels[i - 1];
                n += 1;
            }
            if r > 0 {
                let up = i - w;
                if labels[up] != 0 {
                    neighbors[n] = labels[up];
                    n += 1;
                }
                if connectivity == Connectivity::Eight {
                    if c > 0 && labels[up - 1] != 0 {
                        neighbors[n] = labels[up - 1];
                        n += 1;
                    }
                    if c + 1 < w && labels[up + 1] != 0 {
                        neighbors[n] = labels[up + 1];
                        n += 1;
                    }
                }
            }
            labels[i] = if n == 0 {
                let fresh = parent.len() as u32;
                parent.push(fresh);
                fresh
            } else {
                let mut root = neighbors[0];
                for &other in &neighbors[1..n] {
                    root = union(&mut parent, root, other);
                }
                find(&mut parent, root)
            };
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut next = 0u32;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l) as usize;
        if remap[root] == 0 {
            next += 1;
            remap[root] = next;
        }
        *l = remap[root];
    }
    (
        Plane::from_vec(w, h, labels).expect("label plane matches mask size"),
        next,
    )
}

// Moore neighbourhood in clockwise screen order, starting west.
const RING: [(isize, isize); 8] = [
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
];

fn ring_index(dr: isize, dc: isize) -> usize {
    RING.iter()
        .position(|&d| d == (dr, dc))
        .expect("offset is a Moore neighbour")
}

/// Moore-neighbour trace of the outer boundary of region `id`, starting at
/// its topmost-leftmost pixel `start`.
fn trace_boundary(
    labels: &Plane<u32>,
    id: u32,
    start: (usize, usize),
    area: usize,
) -> Vec<(usize, usize)> {
    let (w, h) = labels.dims();
    let inside = |r: isize, c: isize| {
        r >= 0
            && c >= 0
            && (r as usize) < h
            && (c as usize) < w
            && labels.get(r as usize, c as usize) == id
    };
    let step = |p: (isize, isize), back: usize| -> Option<((isize, isize), usize)> {
        for k in 1..=8 {
            let d = (back + k) % 8;
            let q = (p.0 + RING[d].0, p.1 + RING[d].1);
            if inside(q.0, q.1) {
                let prev = (back + k - 1) % 8;
                let b = (p.0 + RING[prev].0, p.1 + RING[prev].1);
                return Some((q, ring_index(b.0 - q.0, b.1 - q.1)));
            }
        }
        None
    };

    let s = (start.0 as isize, start.1 as isize);
    let mut out = vec![start];
    let Some((first, mut back)) = step(s, 0) else {
        return out;
    };
    let mut p = first;
    // every boundary pixel is entered at most 4 times
    let limit = 4 * area + 8;
    for _ in 0..limit {
        if p == s {
            match step(p, back) {
                Some((q, _)) if q == first => break,
                _ => {}
            }
        }
        out.push((p.0 as usize, p.1 as usize));
        match step(p, back) {
            Some((q, b)) => {
                p = q;
                back = b;
            }
            None => break,
        }
    }
    out
}

/// Labels `mask` and computes area, bounding box, centroid and boundary of
/// every component. An empty mask yields an empty set.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> RegionSet {
    let (label_plane, n) = label_components(mask, connectivity);
    let w = label_plane.width();
    let n = n as usize;
    let mut area = vec![0usize; n];
    let mut sums = vec![(0u64, 0u64); n];
    let mut bbox = vec![(usize::MAX, usize::MAX, 0usize, 0usize); n];
    let mut first = vec![None; n];
    for (i, &l) in label_plane.as_slice().iter().enumerate() {
        if l == 0 {
            continue;
        }
        let k = (l - 1) as usize;
        let (r, c) = (i / w, i % w);
        area[k] += 1;
        sums[k].0 += r as u64;
        sums[k].1 += c as u64;
        let b = &mut bbox[k];
        b.0 = b.0.min(r);
        b.1 = b.1.min(c);
        b.2 = b.2.max(r);
        b.3 = b.3.max(c);
        first[k].get_or_insert((r, c));
    }
    let regions = (0..n)
        .map(|k| {
            let a = area[k];
            RegionStats {
                id: k as u32 + 1,
                area: a,
                bbox: bbox[k],
                centroid: (sums[k].0 as f64 / a as f64, sums[k].1 as f64 / a as f64),
                boundary: trace_boundary(
                    &label_plane,
                    k as u32 + 1,
                    first[k].expect("nonempty"),
                    a,
                ),
            }
        })
        .collect();
    RegionSet {
        label_plane,
        regions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        BinaryMask::from_fn(w, h, |r, c| rows[r].as_bytes()[c] == b'#')
    }

    #[test]
    fn empty_mask_has_no_regions() {
        let set = connected_components(&BinaryMask::new(5, 4), Connectivity::Eight);
        assert!(set.is_empty());
        assert!(set.label_plane.as_slice().iter().all(|&l| l == 0));
    }

    #[test]
    fn diagonal_pixels_depend_on_connectivity() {
        let m = mask(&["#.", ".#"]);
        assert_eq!(connected_components(&m, Connectivity::Eight).len(), 1);
        assert_eq!(connected_components(&m, Connectivity::Four).len(), 2);
    }

    #[test]
    fn ids_follow_scan_order() {
        // the U-shape merges late; its id must still come from its first pixel
        let m = mask(&["#.#.#", "#.#..", "###.#"]);
        let set = connected_components(&m, Connectivity::Four);
        assert_eq!(set.len(), 3);
        assert_eq!(set.label_plane.get(0, 0), 1);
        assert_eq!(set.label_plane.get(0, 2), 1);
        assert_eq!(set.label_plane.get(0, 4), 2);
        assert_eq!(set.label_plane.get(2, 4), 3);
        assert_eq!(set.regions[0].area, 7);
    }

    #[test]
    fn stats_of_a_rectangle() {
        let m = mask(&[".....", ".###.", ".###.", "....."]);
        let set = connected_components(&m, Connectivity::Eight);
        let r = &set.regions[0];
        assert_eq!(r.area, 6);
        assert_eq!(r.bbox, (1, 1, 2, 3));
        assert_eq!(r.centroid, (1.5, 2.0));
        assert_eq!(
            r.boundary,
            vec![(1, 1), (1, 2), (1, 3), (2, 3), (2, 2), (2, 1)]
        );
    }

    #[test]
    fn single_pixel_boundary() {
        let m = mask(&["...", ".#.", "..."]);
        let set = connected_components(&m, Connectivity::Eight);
        assert_eq!(set.regions[0].boundary, vec![(1, 1)]);
    }

    #[test]
    fn boundary_of_plus_shape_is_clockwise() {
        let m = mask(&[".#.", "###", ".#."]);
        let set = connected_components(&m, Connectivity::Four);
        assert_eq!(
            set.regions[0].boundary,
            vec![(0, 1), (1, 2), (2, 1), (1, 0)]
        );
    }

    #[test]
    fn boundary_skips_interior_of_filled_square() {
        let m = BinaryMask::full(4, 4);
        let set = connected_components(&m, Connectivity::Eight);
        let b = &set.regions[0].boundary;
        assert_eq!(b.len(), 12);
        assert!(!b.contains(&(1, 1)));
        assert_eq!(b[0], (0, 0));
        assert_eq!(b[1], (0, 1));
    }

    #[test]
    fn connectivity_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Connectivity::Four).unwrap(), "4");
        let c: Connectivity = serde_json::from_str("8").unwrap();
        assert_eq!(c, Connectivity::Eight);
        assert!(serde_json::from_str::<Connectivity>("6").is_err());
    }
}
