use boxrecycle::{BBox2D, ClassId, Object3D};
use rand::Rng;

/// Footprint corners from the heading vectors: the length axis points along
/// `(cos ry, -sin ry)` and the width axis along `(sin ry, cos ry)` in (x, z).
pub fn footprint_corners(o: &Object3D) -> [[f64; 2]; 4] {
    let (s, c) = o.rotation_y.sin_cos();
    let u = [c * o.dims.l / 2.0, -s * o.dims.l / 2.0];
    let v = [s * o.dims.w / 2.0, c * o.dims.w / 2.0];
    let [x, _, z] = o.location;
    [
        [x + u[0] + v[0], z + u[1] + v[1]],
        [x + u[0] - v[0], z + u[1] - v[1]],
        [x - u[0] - v[0], z - u[1] - v[1]],
        [x - u[0] + v[0], z - u[1] + v[1]],
    ]
}

/// `z` interval where the vertical line at `x` crosses a convex polygon.
fn chord(poly: &[[f64; 2]], x: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (x0, x1) = (p[0].min(q[0]), p[0].max(q[0]));
        if x < x0 || x > x1 || x1 == x0 {
            continue;
        }
        let t = (x - p[0]) / (q[0] - p[0]);
        let z = p[1] + t * (q[1] - p[1]);
        lo = lo.min(z);
        hi = hi.max(z);
    }
    (hi > lo).then_some((lo, hi))
}

/// Intersection area of two convex polygons by midpoint quadrature over
/// `columns` vertical strips, each strip's overlap measured exactly.
pub fn convex_overlap_columns(a: &[[f64; 2]], b: &[[f64; 2]], columns: usize) -> f64 {
    let min_x = a.iter().chain(b).map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let max_x = a.iter().chain(b).map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let dx = (max_x - min_x) / columns as f64;
    if dx <= 0.0 {
        return 0.0;
    }
    (0..columns)
        .map(|i| {
            let x = min_x + (i as f64 + 0.5) * dx;
            match (chord(a, x), chord(b, x)) {
                (Some((a0, a1)), Some((b0, b1))) => (a1.min(b1) - a0.max(b0)).max(0.0),
                _ => 0.0,
            }
        })
        .sum::<f64>()
        * dx
}

pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1])
        .sum::<f64>()
        .abs()
        / 2.0
}

/// BEV IoU from column quadrature.
pub fn iou_bev_oracle(a: &Object3D, b: &Object3D, columns: usize) -> f64 {
    let (fa, fb) = (footprint_corners(a), footprint_corners(b));
    let inter = convex_overlap_columns(&fa, &fb, columns);
    let union = a.dims.l * a.dims.w + b.dims.l * b.dims.w - inter;
    inter / union
}

/// Voxelization oracle for 3D IoU on a `columns x columns x cells` grid over
/// the joint bounding volume: x by column quadrature (z resolved exactly within
/// a column), y by counting `cells` cell centers inside both height ranges.
pub fn iou_3d_oracle(a: &Object3D, b: &Object3D, columns: usize, cells: usize) -> f64 {
    let (fa, fb) = (footprint_corners(a), footprint_corners(b));
    let bev = convex_overlap_columns(&fa, &fb, columns);
    let top = (a.location[1] - a.dims.h).min(b.location[1] - b.dims.h);
    let bottom = a.location[1].max(b.location[1]);
    let dy = (bottom - top) / cells as f64;
    let inside = |o: &Object3D, y: f64| y >= o.location[1] - o.dims.h && y <= o.location[1];
    let shared = (0..cells)
        .filter(|i| {
            let y = top + (*i as f64 + 0.5) * dy;
            inside(a, y) && inside(b, y)
        })
        .count() as f64
        * dy;
    let inter = bev * shared;
    let vol = |o: &Object3D| o.dims.h * o.dims.w * o.dims.l;
    inter / (vol(a) + vol(b) - inter)
}

/// Monte-Carlo estimate of the area of `a ∩ b` by uniform sampling of their
/// joint bounding box. Returns `(estimate, standard error)`.
pub fn monte_carlo_overlap<R: Rng>(a: &[[f64; 2]], b: &[[f64; 2]], samples: usize, rng: &mut R) -> (f64, f64) {
    let pts = a.iter().chain(b);
    let (mut x0, mut x1, mut z0, mut z1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        z0 = z0.min(p[1]);
        z1 = z1.max(p[1]);
    }
    let box_area = (x1 - x0) * (z1 - z0);
    let hits = (0..samples)
        .filter(|_| {
            let p = [rng.gen_range(x0..x1), rng.gen_range(z0..z1)];
            point_in_convex(a, p) && point_in_convex(b, p)
        })
        .count() as f64;
    let frac = hits / samples as f64;
    let se = (frac * (1.0 - frac) / samples as f64).sqrt() * box_area;
    (frac * box_area, se)
}

/// Sign test against every edge; works for either winding.
pub fn point_in_convex(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    let mut pos = false;
    let mut neg = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        pos |= c > 0.0;
        neg |= c < 0.0;
    }
    !(pos && neg)
}

/// MOL label by counting 1-px cells of an integer window. Boxes must have
/// integer coordinates for the count to be exact.
pub fn raster_soft_label(window: [i64; 4], objects: &[Object3D], classes: &[ClassId]) -> Vec<f64> {
    let [l, t, r, b] = window;
    let area = ((r - l) * (b - t)) as f64;
    let covers = |bb: &BBox2D, x: i64, y: i64| {
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        bb.left <= cx && cx < bb.right && bb.top <= cy && cy < bb.bottom
    };
    let mut label: Vec<f64> = classes
        .iter()
        .map(|class| {
            let boxes: Vec<&BBox2D> = objects.iter().filter(|o| o.class == *class).map(|o| &o.bbox).collect();
            let mut n = 0u64;
            for y in t..b {
                for x in l..r {
                    if boxes.iter().any(|bb| covers(bb, x, y)) {
                        n += 1;
                    }
                }
            }
            n as f64 / area
        })
        .collect();
    let total: f64 = label.iter().sum();
    if total > 1.0 {
        label.iter_mut().for_each(|v| *v /= total);
        label.push(0.0);
    } else {
        label.push(1.0 - total);
    }
    label
}

/// Interpolated AP straight from the definition: for each recall sample,
/// scan every rank for the best precision at that recall or above.
pub fn brute_force_ap(ranked_tp: &[bool], n_gt: usize, thresholds: &[f64]) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut points = Vec::new();
    let mut tp = 0usize;
    for (k, hit) in ranked_tp.iter().enumerate() {
        tp += *hit as usize;
        points.push((tp as f64 / n_gt as f64, tp as f64 / (k + 1) as f64));
    }
    thresholds
        .iter()
        .map(|r| {
            points
                .iter()
                .filter(|(rec, _)| *rec >= r - 1e-12)
                .map(|(_, p)| *p)
                .fold(0.0, f64::max)
        })
        .sum::<f64>()
        / thresholds.len() as f64
}

pub fn r40() -> Vec<f64> {
    (1..=40).map(|i| i as f64 / 40.0).collect()
}

pub fn r11() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}
