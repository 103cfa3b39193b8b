use boxrecycle::ssl_mol::{sample_windows, soft_label, MolConfig};
use boxrecycle::{BBox2D, ClassId, Object3D};
use boxrecycle_testkit::fixtures::{random_object, rng};
use boxrecycle_testkit::oracles::raster_soft_label;
use rand::Rng;

const DIMS: (u32, u32) = (64, 48);

fn random_window<R: Rng>(r: &mut R) -> [u32; 4] {
    let l = r.gen_range(0..DIMS.0 - 1);
    let t = r.gen_range(0..DIMS.1 - 1);
    [l, t, r.gen_range(l + 1..=DIMS.0), r.gen_range(t + 1..=DIMS.1)]
}

fn as_bbox(w: [u32; 4]) -> BBox2D {
    let [l, t, r, b] = w.map(f64::from);
    BBox2D::new(l, t, r, b)
}

#[test]
fn integer_boxes_match_the_raster_exactly() {
    let mut r = rng(10);
    let classes = ClassId::EVAL.to_vec();
    for _ in 0..2000 {
        let objects: Vec<Object3D> = (0..r.gen_range(0..5))
            .map(|_| random_object(&mut r, DIMS, true))
            .filter(|o| o.class != ClassId::DontCare)
            .collect();
        let w = random_window(&mut r);
        let label = soft_label(&as_bbox(w), &objects, &classes).proportions;
        let raster = raster_soft_label(w.map(i64::from), &objects, &classes);
        assert!((label.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for (a, b) in label.iter().zip(&raster) {
            assert!((a - b).abs() < 1e-9, "{label:?} vs {raster:?}");
        }
    }
}

#[test]
fn fractional_boxes_stay_within_the_pixel_edge_bound() {
    let mut r = rng(11);
    let classes = ClassId::EVAL.to_vec();
    for _ in 0..2000 {
        let objects: Vec<Object3D> = (0..r.gen_range(0..4))
            .map(|_| random_object(&mut r, DIMS, false))
            .filter(|o| o.class != ClassId::DontCare)
            .collect();
        let w = random_window(&mut r);
        let window = as_bbox(w);
        let label = soft_label(&window, &objects, &classes).proportions;
        let raster = raster_soft_label(w.map(i64::from), &objects, &classes);
        // Only the pixels crossed by a box edge can disagree.
        let edge_pixels: f64 = objects
            .iter()
            .filter_map(|o| o.bbox.intersection(&window))
            .map(|b| 2.0 * (b.width() + b.height() + 2.0))
            .sum();
        let bound = edge_pixels / window.area();
        let raw: f64 = raster[..classes.len()].iter().sum();
        if raw > 1.0 || label[classes.len()] == 0.0 {
            continue;
        }
        for (a, b) in label.iter().zip(&raster) {
            assert!((a - b).abs() <= bound + 1e-9);
        }
    }
}

#[test]
fn window_inside_a_box_is_one_hot() {
    let mut r = rng(12);
    let classes = ClassId::EVAL.to_vec();
    for _ in 0..1000 {
        let o = random_object(&mut r, DIMS, true);
        if o.class == ClassId::DontCare || o.bbox.width() < 2.0 || o.bbox.height() < 2.0 {
            continue;
        }
        let (l, t) = (o.bbox.left as u32, o.bbox.top as u32);
        let w = [
            l,
            t,
            r.gen_range(l + 1..=o.bbox.right as u32),
            r.gen_range(t + 1..=o.bbox.bottom as u32),
        ];
        let label = soft_label(&as_bbox(w), std::slice::from_ref(&o), &classes).proportions;
        let hot = classes.iter().position(|c| *c == o.class).unwrap();
        for (i, v) in label.iter().enumerate() {
            assert_eq!(*v, if i == hot { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn windows_are_valid_and_reproducible() {
    let cfg = MolConfig {
        n_windows: 64,
        seed: 3,
        ..MolConfig::default()
    };
    let a = sample_windows(DIMS, &[], &[], &cfg, "000001").unwrap();
    let b = sample_windows(DIMS, &[], &[], &cfg, "000001").unwrap();
    let c = sample_windows(DIMS, &[], &[], &cfg, "000002").unwrap();
    assert_eq!(a, b);
    assert_ne!(
        a.iter().map(|w| w.rect).collect::<Vec<_>>(),
        c.iter().map(|w| w.rect).collect::<Vec<_>>()
    );
    for w in &a {
        let [l, t, r, b] = w.rect;
        assert!(l < r && t < b && r <= DIMS.0 && b <= DIMS.1);
        let (sx, sy) = ((r - l) as f64 / DIMS.0 as f64, (b - t) as f64 / DIMS.1 as f64);
        assert!((0.05..=1.0).contains(&sx) && (0.05..=1.0).contains(&sy));
    }
}
