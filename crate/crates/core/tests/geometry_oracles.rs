use boxrecycle::geometry::{box3d_corners, convex_clip, footprint, iou_3d, iou_bev, project_keypoints, Polygon2D};
use boxrecycle::{BBox2D, Calibration, ClassId, Dims, Object3D};
use boxrecycle_testkit::fixtures::{overlapping_pair, rng};
use boxrecycle_testkit::oracles::{
    footprint_corners, iou_3d_oracle, iou_bev_oracle, monte_carlo_overlap, polygon_area,
};
use rand::Rng;

fn car(dims: Dims, location: [f64; 3], ry: f64) -> Object3D {
    Object3D::new(ClassId::Car, BBox2D::new(0.0, 0.0, 1.0, 1.0), dims, location, ry)
}

#[test]
fn corners_match_hand_computed_rotation() {
    let o = car(Dims::new(1.5, 1.6, 3.9), [2.0, 1.0, 20.0], 0.3);
    let corners = box3d_corners(&o);
    let (s, c) = 0.3f64.sin_cos();
    // Front-left bottom corner from the heading vectors.
    let expect_x = 2.0 + c * 1.95 + s * 0.8;
    let expect_z = 20.0 - s * 1.95 + c * 0.8;
    let found = corners
        .corners
        .iter()
        .any(|p| (p[0] - expect_x).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12 && (p[2] - expect_z).abs() < 1e-12);
    assert!(found, "{:?}", corners.corners);
    assert!((corners.center[1] - 0.25).abs() < 1e-12);
    for p in &corners.corners {
        assert!(p[1] == 1.0 || (p[1] + 0.5).abs() < 1e-12);
    }
}

#[test]
fn footprint_agrees_with_heading_vector_corners() {
    let mut r = rng(11);
    for _ in 0..200 {
        let (a, _) = overlapping_pair(&mut r);
        let ours = footprint(&a);
        let theirs = footprint_corners(&a);
        assert!((ours.area() - polygon_area(&theirs)).abs() < 1e-9);
        for p in theirs {
            assert!(ours
                .vertices()
                .iter()
                .any(|q| (q[0] - p[0]).abs() < 1e-9 && (q[1] - p[1]).abs() < 1e-9));
        }
    }
}

#[test]
fn projection_of_center_lands_on_principal_point_offset() {
    let calib = Calibration::pinhole(700.0, 600.0, 180.0);
    let o = car(Dims::new(1.5, 1.6, 3.9), [1.0, 1.5, 10.0], 0.0);
    let kp = project_keypoints(&box3d_corners(&o), &calib).unwrap();
    // Center is at (1, 0.75, 10): u = 700 * 1 / 10 + 600.
    assert!((kp[8][0] - 670.0).abs() < 1e-9);
    assert!((kp[8][1] - (700.0 * 0.75 / 10.0 + 180.0)).abs() < 1e-9);
}

#[test]
fn iou_matches_quadrature_oracles() {
    let mut r = rng(2024);
    for _ in 0..200 {
        let (a, b) = overlapping_pair(&mut r);
        let bev = iou_bev(&a, &b);
        let bev_ref = iou_bev_oracle(&a, &b, 4096);
        assert!((bev - bev_ref).abs() < 1e-3, "bev {bev} vs {bev_ref}");
        let v = iou_3d(&a, &b);
        let v_ref = iou_3d_oracle(&a, &b, 4096, 4096);
        assert!((v - v_ref).abs() < 1e-3, "3d {v} vs {v_ref}");
    }
}

#[test]
fn octagon_area_matches_monte_carlo() {
    let square = |ry: f64| car(Dims::new(1.0, 2.0, 2.0), [0.0, 0.0, 0.0], ry);
    let a = footprint_corners(&square(0.0));
    let b = footprint_corners(&square(std::f64::consts::FRAC_PI_4));
    let exact = convex_clip(
        &footprint(&square(0.0)),
        &footprint(&square(std::f64::consts::FRAC_PI_4)),
    )
    .area();
    assert!((exact - 8.0 * (2f64.sqrt() - 1.0)).abs() < 1e-12);
    let (est, se) = monte_carlo_overlap(&a, &b, 2_000_000, &mut rng(5));
    assert!((exact - est).abs() < 4.0 * se, "{exact} vs {est} +- {se}");
}

#[test]
fn clipped_area_is_within_three_sigma_of_monte_carlo() {
    let mut r = rng(99);
    let mut misses = 0;
    let trials = 300;
    for _ in 0..trials {
        let (a, b) = overlapping_pair(&mut r);
        let exact = convex_clip(&footprint(&a), &footprint(&b)).area();
        let (est, se) = monte_carlo_overlap(&footprint_corners(&a), &footprint_corners(&b), 20_000, &mut r);
        if (exact - est).abs() > 3.0 * se.max(1e-9) {
            misses += 1;
        }
    }
    // About 0.3% of honest estimates fall outside three standard errors.
    assert!(misses <= trials / 50, "{misses} of {trials} outside 3 sigma");
}

#[test]
fn iou_is_invariant_under_rigid_motion() {
    let mut r = rng(7);
    for _ in 0..300 {
        let (a, b) = overlapping_pair(&mut r);
        let theta: f64 = r.gen_range(-3.0..3.0);
        let shift = [
            r.gen_range(-50.0..50.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-50.0..50.0),
        ];
        let (s, c) = theta.sin_cos();
        let moved = |o: &Object3D| {
            let mut m = o.clone();
            let [x, y, z] = o.location;
            m.location = [c * x + s * z + shift[0], y + shift[1], -s * x + c * z + shift[2]];
            m.rotation_y = o.rotation_y + theta;
            m
        };
        assert!((iou_bev(&a, &b) - iou_bev(&moved(&a), &moved(&b))).abs() < 1e-9);
        assert!((iou_3d(&a, &b) - iou_3d(&moved(&a), &moved(&b))).abs() < 1e-9);
    }
}

#[test]
fn contained_box_gives_volume_ratio() {
    let outer = car(Dims::new(2.0, 2.0, 4.0), [0.0, 1.0, 10.0], 0.4);
    let inner = car(Dims::new(1.0, 1.0, 2.0), [0.0, 0.5, 10.0], 0.4);
    assert!((iou_3d(&outer, &inner) - 2.0 / 16.0).abs() < 1e-12);
    assert!((iou_bev(&outer, &inner) - 2.0 / 8.0).abs() < 1e-12);
}

#[test]
fn polygon_clip_of_disjoint_squares_is_empty() {
    let a = Polygon2D::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    let b = Polygon2D::new(vec![[2.0, 0.0], [3.0, 0.0], [3.0, 1.0], [2.0, 1.0]]);
    assert!(convex_clip(&a, &b).area() < 1e-12);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_box() -> impl Strategy<Value = Object3D> {
        (
            0.3..3.0f64,
            0.3..3.0f64,
            0.3..6.0f64,
            -5.0..5.0f64,
            -1.0..2.0f64,
            5.0..15.0f64,
            -3.2..3.2f64,
        )
            .prop_map(|(h, w, l, x, y, z, ry)| car(Dims::new(h, w, l), [x, y, z], ry))
    }

    proptest! {
        #[test]
        fn iou_is_symmetric_and_bounded(a in arb_box(), b in arb_box()) {
            for f in [iou_bev, iou_3d] {
                let ab = f(&a, &b);
                prop_assert_eq!(ab, f(&b, &a));
                prop_assert!((0.0..=1.0).contains(&ab));
            }
        }

        #[test]
        fn self_iou_is_one(a in arb_box()) {
            prop_assert!((iou_bev(&a, &a) - 1.0).abs() < 1e-9);
            prop_assert!((iou_3d(&a, &a) - 1.0).abs() < 1e-9);
        }

        #[test]
        fn three_d_never_exceeds_bev(a in arb_box(), b in arb_box()) {
            prop_assert!(iou_3d(&a, &b) <= iou_bev(&a, &b) + 1e-12);
        }
    }
}
