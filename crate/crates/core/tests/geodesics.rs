use std::f64::consts::{PI, TAU};

use lochness_core::slit::{Limit, TraceEvent};
use lochness_core::{FlatPoint, Side, SlitSurface};
use proptest::prelude::*;

fn surface(k: usize, on_cylinder: bool) -> SlitSurface {
    if on_cylinder {
        SlitSurface::cylinder(k, 8.0 * k as f64 + 4.0).unwrap()
    } else {
        SlitSurface::monster(k).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn traces_aimed_at_slits(
        k in 1usize..6,
        on_cylinder in any::<bool>(),
        pick in 0usize..10,
        along in 0.01f64..0.99,
        back in 0.1f64..4.0,
        theta in 0.05f64..(PI - 0.05),
        below in any::<bool>(),
        extra in 0.5f64..30.0,
    ) {
        let s = surface(k, on_cylinder);
        let l = s.slits()[pick % s.slits().len()];
        let theta = if below { theta } else { -theta };
        let (dx, dy) = (theta.cos(), theta.sin());
        let start = FlatPoint::Regular { x: l.left + along - back * dx, y: -back * dy };
        let t = s.trace_geodesic(start, (dx, dy), 50, back + extra).unwrap();

        prop_assert!(t.crossings().count() >= 1 || t.hit_singularity());
        for ev in &t.events {
            if let TraceEvent::Crossing { entry, exit, direction, slit } = ev {
                prop_assert_eq!(s.glue(*entry).unwrap(), *exit);
                prop_assert_eq!(s.glue(*exit).unwrap(), *entry);
                prop_assert_eq!(direction.0.to_bits(), t.direction.0.to_bits());
                prop_assert_eq!(direction.1.to_bits(), t.direction.1.to_bits());
                let FlatPoint::OnSlit { slit: exit_slit, .. } = exit else {
                    panic!("exit off the slit");
                };
                prop_assert_eq!(*exit_slit, SlitSurface::partner(*slit));
            }
        }
        prop_assert!((t.polyline_length() - t.length).abs() <= 1e-9);

        if matches!(t.events.last(), Some(TraceEvent::Limit { limit: Limit::MaxLength })) {
            let back_trace = s.trace_geodesic(t.end, (-dx, -dy), 50, t.length).unwrap();
            let (a, b) = (s.position(&back_trace.end), s.position(&t.start));
            prop_assert!((a.0 - b.0).hypot(a.1 - b.1) <= 1e-9, "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn crossing_translates_by_four(k in 1usize..6, pair in 0usize..5, along in 0.01f64..0.99, up in any::<bool>()) {
        let s = SlitSurface::monster(k).unwrap();
        let odd = 2 * (pair % k) + 1;
        let x = s.slit(odd).left + along;
        let side = if up { Side::Upper } else { Side::Lower };
        let p = s.point(x, 0.0, Some(side)).unwrap();
        let q = s.glue(p).unwrap();
        let (qx, qy) = s.position(&q);
        prop_assert_eq!(qy, 0.0);
        prop_assert!((qx - (x + 4.0)).abs() < 1e-12);
        prop_assert_eq!(q.side(), Some(side.flip()));
    }
}

#[test]
fn cone_angles_at_every_endpoint() {
    for k in 1..=5 {
        let s = SlitSurface::monster(k).unwrap();
        for l in s.slits() {
            for x in [l.left, l.right()] {
                let p = FlatPoint::Regular { x, y: 0.0 };
                assert!(s.is_singular(x, 0.0));
                for r in [1e-4, 1e-3, 0.1] {
                    let a = s.cone_angle(&p, r);
                    assert!((a - 2.0 * TAU).abs() < 1e-6, "k={k} x={x} r={r}: {a}");
                }
            }
        }
    }
}

#[test]
fn interior_slit_points_are_flat() {
    let s = SlitSurface::monster(3).unwrap();
    for l in s.slits() {
        for along in [0.1, 0.5, 0.9] {
            for side in [Side::Upper, Side::Lower] {
                let p = s.point(l.left + along, 0.0, Some(side)).unwrap();
                assert!((s.cone_angle(&p, 1e-3) - TAU).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn long_cylinder_trace_keeps_direction() {
    let s = SlitSurface::cylinder(2, 20.0).unwrap();
    let dir: (f64, f64) = (1.0, -1e-3);
    let t = s
        .trace_geodesic(FlatPoint::Regular { x: 1.5, y: 0.05 }, dir, 50, 2000.0)
        .unwrap();
    let norm = dir.0.hypot(dir.1);
    assert_eq!(t.direction, (dir.0 / norm, dir.1 / norm));
    assert!(t
        .polyline
        .iter()
        .all(|seg| seg.from.0 >= -1e-9 && seg.to.0 <= 20.0 + 1e-9));
    assert!((t.polyline_length() - t.length).abs() <= 1e-9);
}
