//! Box geometry in the KITTI camera frame (x right, y down, z forward).
//!
//! A 3D box is a prism: its bird's-eye-view footprint is a yawed rectangle in
//! the (x, z) plane and it spans `[y - h, y]` vertically, where `y` is the
//! bottom face. Overlaps are therefore footprint intersection area (convex
//! clipping) times vertical overlap.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kitti_io::{BBox2D, Calibration, Object3D};

/// Tolerance for half-plane tests and vertex merging.
pub const CLIP_EPS: f64 = 1e-9;
/// Polygons with less area than this count as degenerate.
pub const MIN_AREA: f64 = 1e-12;

/// Convex polygon in the (x, z) plane, counter-clockwise (positive shoelace
/// area with x as the first coordinate).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon2D {
    vertices: Vec<[f64; 2]>,
}

impl Polygon2D {
    /// Takes vertices of a convex polygon in either winding and stores them
    /// counter-clockwise.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Self {
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Self { vertices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).max(0.0)
    }

    /// Point membership, boundary included.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        if self.is_empty() {
            return false;
        }
        let n = self.vertices.len();
        (0..n).all(|i| cross(self.vertices[i], self.vertices[(i + 1) % n], p) >= 0.0)
    }
}

fn signed_area(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let [x0, z0] = vertices[i];
            let [x1, z1] = vertices[(i + 1) % n];
            x0 * z1 - x1 * z0
        })
        .sum();
    0.5 * twice
}

/// z-component of (b - a) x (p - a); positive when p is left of a->b.
fn cross(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// The eight cuboid vertices plus the volumetric center.
///
/// Corners 0-3 are the bottom face (at `location.y`), counter-clockwise seen
/// from above; corner `i + 4` sits directly above corner `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corners3D {
    pub corners: [[f64; 3]; 8],
    pub center: [f64; 3],
}

impl Corners3D {
    /// Corners followed by the center: the nine keypoints of the cuboid.
    pub fn keypoints(&self) -> [[f64; 3]; 9] {
        let mut out = [[0.0; 3]; 9];
        out[..8].copy_from_slice(&self.corners);
        out[8] = self.center;
        out
    }

    /// The 12 edges as corner index pairs.
    pub const EDGES: [(usize, usize); 12] = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 0),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 4),
        (0, 4),
        (1, 5),
        (2, 6),
        (3, 7),
    ];
}

/// Bottom-face (x, z) offsets relative to the box center, before yaw.
fn footprint_offsets(obj: &Object3D) -> [[f64; 2]; 4] {
    let hl = obj.dims.l / 2.0;
    let hw = obj.dims.w / 2.0;
    let (s, c) = obj.rotation_y.sin_cos();
    [[hl, -hw], [hl, hw], [-hl, hw], [-hl, -hw]].map(|[x, z]| [c * x + s * z, -s * x + c * z])
}

pub fn box3d_corners(obj: &Object3D) -> Corners3D {
    let [x, y, z] = obj.location;
    let h = obj.dims.h;
    let offsets = footprint_offsets(obj);
    let mut corners = [[0.0; 3]; 8];
    for (i, [dx, dz]) in offsets.into_iter().enumerate() {
        corners[i] = [x + dx, y, z + dz];
        corners[i + 4] = [x + dx, y - h, z + dz];
    }
    Corners3D {
        corners,
        center: [x, y - h / 2.0, z],
    }
}

/// Bird's-eye-view footprint of the box; empty for non-positive width or
/// length (including the `-1` DontCare sentinel).
pub fn footprint(obj: &Object3D) -> Polygon2D {
    if obj.dims.w <= 0.0 || obj.dims.l <= 0.0 {
        return Polygon2D::empty();
    }
    let [x, _, z] = obj.location;
    Polygon2D::new(footprint_offsets(obj).iter().map(|[dx, dz]| [x + dx, z + dz]).collect())
}

/// Projects one camera-frame point through `P2`.
pub fn project_point(p: [f64; 3], calib: &Calibration) -> [f64; 2] {
    let m = &calib.p2;
    let u: [f64; 3] = std::array::from_fn(|r| m[r][0] * p[0] + m[r][1] * p[1] + m[r][2] * p[2] + m[r][3]);
    [u[0] / u[2], u[1] / u[2]]
}

/// Image positions of the nine keypoints (8 corners, then center).
pub fn project_keypoints(corners: &Corners3D, calib: &Calibration) -> Result<[[f64; 2]; 9]> {
    let points = corners.keypoints();
    if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| p[2] <= 0.0) {
        return Err(Error::BehindCamera { index, z: p[2] });
    }
    Ok(points.map(|p| project_point(p, calib)))
}

/// Intersection of two convex polygons by successive half-plane clipping of
/// `subject` against each edge of `clip`.
pub fn convex_clip(subject: &Polygon2D, clip: &Polygon2D) -> Polygon2D {
    if subject.is_empty() || clip.is_empty() {
        return Polygon2D::empty();
    }
    let mut out = subject.vertices.clone();
    let edges = &clip.vertices;
    for i in 0..edges.len() {
        let a = edges[i];
        let b = edges[(i + 1) % edges.len()];
        let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
        if len <= CLIP_EPS {
            continue;
        }
        out = clip_half_plane(&out, a, b, len);
        if out.len() < 3 {
            return Polygon2D::empty();
        }
    }
    dedup(&mut out);
    if out.len() < 3 {
        return Polygon2D::empty();
    }
    Polygon2D { vertices: out }
}

fn clip_half_plane(poly: &[[f64; 2]], a: [f64; 2], b: [f64; 2], len: f64) -> Vec<[f64; 2]> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    // signed distance to the line, positive on the inside (left)
    let dist = |p: [f64; 2]| cross(a, b, p) / len;
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let ds = dist(s);
        let de = dist(e);
        let s_in = ds >= -CLIP_EPS;
        let e_in = de >= -CLIP_EPS;
        if s_in && e_in {
            out.push(e);
        } else if s_in || e_in {
            // strictly one side each; a crossing point exists
            if (ds > CLIP_EPS && de < -CLIP_EPS) || (ds < -CLIP_EPS && de > CLIP_EPS) {
                let t = ds / (ds - de);
                out.push([s[0] + (e[0] - s[0]) * t, s[1] + (e[1] - s[1]) * t]);
            }
            if e_in {
                out.push(e);
            }
        }
    }
    dedup(&mut out);
    out
}

fn dedup(vertices: &mut Vec<[f64; 2]>) {
    let close = |p: &[f64; 2], q: &[f64; 2]| (p[0] - q[0]).abs() <= CLIP_EPS && (p[1] - q[1]).abs() <= CLIP_EPS;
    vertices.dedup_by(|p, q| close(p, q));
    while vertices.len() > 1 && close(&vertices[0], vertices.last().unwrap()) {
        vertices.pop();
    }
}

/// Canonical operand order so overlap(a, b) and overlap(b, a) run the same
/// floating-point operations.
fn ordered<'a>(a: &'a Object3D, b: &'a Object3D) -> (&'a Object3D, &'a Object3D) {
    let key = |o: &Object3D| {
        [
            o.location[0],
            o.location[1],
            o.location[2],
            o.dims.h,
            o.dims.w,
            o.dims.l,
            o.rotation_y,
        ]
    };
    let (ka, kb) = (key(a), key(b));
    let ord = ka
        .iter()
        .zip(kb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal);
    if ord == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

/// Footprint intersection area.
pub fn bev_intersection_area(a: &Object3D, b: &Object3D) -> f64 {
    let (a, b) = ordered(a, b);
    convex_clip(&footprint(a), &footprint(b)).area()
}

pub fn iou_bev(a: &Object3D, b: &Object3D) -> f64 {
    let area_a = footprint(a).area();
    let area_b = footprint(b).area();
    if area_a < MIN_AREA || area_b < MIN_AREA {
        return 0.0;
    }
    let inter = bev_intersection_area(a, b);
    ratio(inter, area_a + area_b - inter)
}

/// Vertical overlap of the `[y - h, y]` extents.
fn y_overlap(a: &Object3D, b: &Object3D) -> f64 {
    let (ya, yb) = (a.location[1], b.location[1]);
    (ya.min(yb) - (ya - a.dims.h).max(yb - b.dims.h)).max(0.0)
}

fn volume(o: &Object3D) -> f64 {
    let d = &o.dims;
    if d.h <= 0.0 || d.w <= 0.0 || d.l <= 0.0 {
        return 0.0;
    }
    d.h * d.w * d.l
}

pub fn iou_3d(a: &Object3D, b: &Object3D) -> f64 {
    let (vol_a, vol_b) = (volume(a), volume(b));
    if vol_a < MIN_AREA || vol_b < MIN_AREA {
        return 0.0;
    }
    let overlap = y_overlap(a, b);
    if overlap <= 0.0 {
        return 0.0;
    }
    let inter = bev_intersection_area(a, b) * overlap;
    ratio(inter, vol_a + vol_b - inter)
}

/// Axis-aligned IoU of image boxes; 0 when either box has no area.
pub fn iou_2d(a: &BBox2D, b: &BBox2D) -> f64 {
    let (area_a, area_b) = (a.area(), b.area());
    if area_a <= 0.0 || area_b <= 0.0 {
        return 0.0;
    }
    let inter = a.intersection(b).map_or(0.0, |r| r.area());
    ratio(inter, area_a + area_b - inter)
}

fn ratio(inter: f64, union: f64) -> f64 {
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}
