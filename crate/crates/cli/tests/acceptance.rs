//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use lochness_core::group::{
    domain_contains, enumerate_words, region_exchange_report, DEFAULT_REDUCTION_CAP,
    DEFAULT_WORD_CAP,
};
use lochness_core::render::{curve_points, Complex64};
use lochness_core::slit::{Limit, TraceEvent};
use lochness_core::{
    count_ends, gen_f, gen_g, probe_fixed_points, reduce_to_domain, truncation_topology, EndBase,
    FlatPoint, GVariant, SlitSurface, TruncationSpec, UpperHalfPoint, DEFAULT_TOL,
};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn lochness(args: &[&str]) -> (Output, Duration) {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lochness"))
        .args(args)
        .output()
        .expect("binary runs");
    (out, t.elapsed())
}

fn json_of(out: &Output) -> Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("bad json report: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn side_pairings() -> Check {
    let (out, elapsed) = lochness(&[
        "hyp",
        "verify",
        "--window",
        "10",
        "--variant",
        "corrected",
        "--json",
    ]);
    ensure(out.status.code() == Some(0), || {
        format!("corrected exit {:?}", out.status.code())
    })?;
    let report = json_of(&out)?;
    let rows = report["pairings"].as_array().ok_or("no pairings")?;
    ensure(rows.len() == 42, || format!("{} rows, want 42", rows.len()))?;
    for row in rows {
        let letter = row["letter"].as_str().unwrap_or_default();
        let m: i64 = letter[1..]
            .parse()
            .map_err(|_| format!("bad letter {letter}"))?;
        let want = if letter.starts_with('f') {
            (format!("C_{}", 16 * m), format!("C_{}", 16 * m + 8))
        } else {
            (format!("C_{}", 16 * m + 4), format!("C_{}", 16 * m + 12))
        };
        ensure(
            row["source"] == want.0.as_str() && row["computed_image"] == want.1.as_str(),
            || format!("{letter}: {} -> {}", row["source"], row["computed_image"]),
        )?;
    }
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;

    let (out, _) = lochness(&[
        "hyp",
        "verify",
        "--window",
        "10",
        "--variant",
        "printed",
        "--json",
    ]);
    ensure(out.status.code() == Some(1), || {
        format!("printed exit {:?}", out.status.code())
    })?;
    let report = json_of(&out)?;
    let mut flagged = 0;
    for row in report["pairings"].as_array().ok_or("no pairings")? {
        let letter = row["letter"].as_str().unwrap_or_default();
        let m: i64 = letter[1..]
            .parse()
            .map_err(|_| format!("bad letter {letter}"))?;
        if letter.starts_with('g') {
            let image = format!("C_{}", 16 * m + 8);
            ensure(
                row["matches"] == false && row["computed_image"] == image.as_str(),
                || format!("printed {letter} gave {}", row["computed_image"]),
            )?;
            flagged += 1;
        } else {
            ensure(row["matches"] == true, || {
                format!("printed {letter} flagged")
            })?;
        }
    }
    Ok(format!(
        "42/42 corrected in {elapsed:.2?}; printed flags {flagged}/21 g-rows onto C_16m+8"
    ))
}

fn region_exchange() -> Check {
    let r = region_exchange_report(5, 64, 1e-9);
    ensure(r.passed(), || format!("{} violations", r.violations.len()))?;
    Ok(format!("{} checks, 0 violations", r.checked))
}

fn determinants_and_traces() -> Check {
    let one = BigInt::from(1);
    for m in -100..=100 {
        let f = gen_f(m);
        let g = gen_g(m, GVariant::Corrected);
        let p = gen_g(m, GVariant::Printed);
        for (name, x) in [("f", &f), ("g", &g), ("printed g", &p)] {
            ensure(x.determinant() == one, || {
                format!("det {name}_{m} = {}", x.determinant())
            })?;
        }
        // matrices are stored up to sign, so the trace is compared in absolute value
        ensure(f.trace().magnitude() == &8u32.into(), || {
            format!("tr f_{m} = {}", f.trace())
        })?;
        ensure(g.trace().magnitude() == &8u32.into(), || {
            format!("tr g_{m} = {}", g.trace())
        })?;
        ensure(p.trace().magnitude() == &4u32.into(), || {
            format!("tr printed g_{m} = {}", p.trace())
        })?;
    }
    Ok("603 matrices with det 1; |tr| = 8, 8, 4".into())
}

fn reduction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10c4);
    let mut steps = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        let re = rng.random_range(-50.0..=50.0);
        let im = 10.0 - rng.random_range(0.0..10.0);
        let z = UpperHalfPoint::new(re, im).map_err(|e| e.to_string())?;
        let r = reduce_to_domain(z, 15, DEFAULT_TOL, DEFAULT_REDUCTION_CAP)
            .map_err(|e| format!("{z}: {e}"))?;
        ensure(domain_contains(&r.point, DEFAULT_TOL), || {
            format!("{z} reduced to {}", r.point)
        })?;
        steps.push(r.steps);
    }
    steps.sort_unstable();
    let median = steps[steps.len() / 2];
    ensure(median <= 3, || format!("median steps {median}"))?;
    Ok(format!(
        "10000 points in P, median {median} steps, max {}",
        steps.last().unwrap()
    ))
}

fn freeness_probe() -> Check {
    let t = Instant::now();
    let p = probe_fixed_points(1, 5, GVariant::Corrected, DEFAULT_WORD_CAP)
        .map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let want = 1 + 12 + 132 + 1452 + 15_972 + 175_692;
    ensure(p.total_words == want, || {
        format!("{} words, want {want}", p.total_words)
    })?;
    ensure(p.distinct_matrices == want, || {
        format!("{} distinct matrices", p.distinct_matrices)
    })?;
    ensure(p.offenders.is_empty(), || {
        format!("{} elliptic/identity elements", p.offenders.len())
    })?;
    ensure(p.all_fixed_points_real, || {
        "fixed point off the real line".into()
    })?;
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{want} distinct words, {} hyperbolic, {} parabolic, in {elapsed:.2?}",
        p.hyperbolic, p.parabolic
    ))
}

fn word_count_law() -> Check {
    let words =
        enumerate_words(1, 4, GVariant::Corrected, DEFAULT_WORD_CAP).map_err(|e| e.to_string())?;
    let mut per_len = [0usize; 5];
    for w in &words {
        per_len[w.word.len()] += 1;
    }
    for d in 1..=4u32 {
        let want = 12 * 11usize.pow(d - 1);
        ensure(per_len[d as usize] == want, || {
            format!("length {d}: {} words, want {want}", per_len[d as usize])
        })?;
    }
    Ok(format!("per-length counts {:?}", &per_len[1..]))
}

fn flat_topology() -> Check {
    for k in 1..=8 {
        let s = truncation_topology(&TruncationSpec::flat(k)).map_err(|e| e.to_string())?;
        ensure(s.genus == k as u64 && s.boundary_components == 1, || {
            format!("k={k}: {s}")
        })?;
    }
    for k in 0..=8 {
        let n = count_ends(EndBase::Plane, k, 3).map_err(|e| e.to_string())?;
        ensure(n == 1, || format!("plane k={k}: {n} ends"))?;
    }
    let n = count_ends(EndBase::Cylinder { circumference: 40 }, 4, 3).map_err(|e| e.to_string())?;
    ensure(n == 2, || format!("cylinder: {n} ends"))?;
    Ok("genus k, one boundary for k=1..8; plane 1 end, cylinder 2 ends".into())
}

fn hyperbolic_subsurface() -> Check {
    for m in -5..=5 {
        let s =
            truncation_topology(&TruncationSpec::Hyperbolic { m }).map_err(|e| e.to_string())?;
        ensure(
            s.euler_characteristic == -1 && s.genus == 1 && s.boundary_components == 1,
            || format!("m={m}: {s}"),
        )?;
    }
    Ok("chi=-1 genus=1 boundary=1 for m=-5..5".into())
}

fn cone_angles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0e);
    let mut endpoints = 0;
    let mut regular = 0;
    for k in 1..=5 {
        let s = SlitSurface::monster(k).map_err(|e| e.to_string())?;
        for slit in s.slits() {
            for x in [slit.left, slit.right()] {
                let a = s.cone_angle(&FlatPoint::Regular { x, y: 0.0 }, 1e-3);
                ensure((a - 4.0 * PI).abs() <= 1e-6, || {
                    format!("k={k} endpoint {x}: {a}")
                })?;
                endpoints += 1;
            }
        }
        let far = 8.0 * k as f64 + 4.0;
        let mut found = 0;
        while found < 100 {
            let (x, y) = (rng.random_range(0.0..far), rng.random_range(-4.0..4.0));
            let near_endpoint = s
                .slits()
                .iter()
                .any(|l| (x - l.left).hypot(y) < 1e-2 || (x - l.right()).hypot(y) < 1e-2);
            if near_endpoint {
                continue;
            }
            let p = s.point(x, y, None).map_err(|e| e.to_string())?;
            let a = s.cone_angle(&p, 1e-3);
            ensure((a - 2.0 * PI).abs() <= 1e-6, || {
                format!("k={k} ({x}, {y}): {a}")
            })?;
            found += 1;
            regular += 1;
        }
    }
    Ok(format!(
        "{endpoints} endpoints at 4pi, {regular} regular points at 2pi"
    ))
}

fn geodesic_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0);
    let mut crossings = 0;
    let mut reversed = 0;
    let mut singular = 0;
    for i in 0..1000 {
        let k = rng.random_range(1..=5);
        let far = 8.0 * k as f64 + 4.0;
        // odd traces run on a cylinder and may cross its seam
        let (s, max_length) = if i % 2 == 0 {
            (SlitSurface::monster(k), 20.0)
        } else {
            (SlitSurface::cylinder(k, far), 500.0)
        };
        let s = s.map_err(|e| e.to_string())?;
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        // a line meets the axis at most once, so most traces are aimed at a slit
        let start = if i % 4 < 3 && theta.sin().abs() > 0.05 {
            let l = s.slits()[rng.random_range(0..s.slits().len())];
            let target = l.left + rng.random_range(0.01..0.99);
            let back = rng.random_range(0.1..4.0);
            FlatPoint::Regular {
                x: target - back * theta.cos(),
                y: -back * theta.sin(),
            }
        } else {
            FlatPoint::Regular {
                x: rng.random_range(0.0..far),
                y: rng.random_range(-4.0..4.0),
            }
        };
        let t = s
            .trace_geodesic(start, (theta.cos(), theta.sin()), 50, max_length)
            .map_err(|e| format!("trace {i}: {e}"))?;
        ensure(t.events.len() <= 51, || {
            format!("trace {i}: {} events", t.events.len())
        })?;
        for ev in &t.events {
            if let TraceEvent::Crossing {
                entry,
                exit,
                direction,
                ..
            } = ev
            {
                let glued = s.glue(*entry).map_err(|e| e.to_string())?;
                ensure(glued == *exit, || {
                    format!("trace {i}: exit is not the glued entry")
                })?;
                ensure(s.glue(glued).map_err(|e| e.to_string())? == *entry, || {
                    format!("trace {i}: gluing is not an involution")
                })?;
                ensure(
                    direction.0.to_bits() == t.direction.0.to_bits()
                        && direction.1.to_bits() == t.direction.1.to_bits(),
                    || format!("trace {i}: direction changed"),
                )?;
                crossings += 1;
            }
        }
        if t.hit_singularity() {
            singular += 1;
        }
        ensure((t.polyline_length() - t.length).abs() <= 1e-9, || {
            format!(
                "trace {i}: polyline {} vs length {}",
                t.polyline_length(),
                t.length
            )
        })?;
        // a trace cut short by the event budget or a cone point has no clean reverse
        let stopped_by_length = matches!(
            t.events.last(),
            Some(TraceEvent::Limit {
                limit: Limit::MaxLength
            })
        );
        if stopped_by_length {
            let back = s
                .trace_geodesic(t.end, (-t.direction.0, -t.direction.1), 50, t.length)
                .map_err(|e| format!("reverse {i}: {e}"))?;
            let (a, b) = (s.position(&back.end), s.position(&t.start));
            ensure((a.0 - b.0).hypot(a.1 - b.1) <= 1e-9, || {
                format!("trace {i}: reverse ends at {a:?}, started at {b:?}")
            })?;
            reversed += 1;
        }
    }
    Ok(format!("1000 traces, {crossings} crossings, {singular} hit cone points, {reversed} reversed to their start"))
}

fn curve_reproduction() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut docs = Vec::new();
    for name in ["a.svg", "b.svg"] {
        let path = dir.path().join(name);
        let (out, _) = lochness(&[
            "curve",
            "--n",
            "6000",
            "--out",
            path.to_str().unwrap(),
            "--json",
        ]);
        ensure(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        let report = json_of(&out)?;
        ensure(report["points"] == 6000, || {
            format!("points {}", report["points"])
        })?;
        docs.push(std::fs::read(Path::new(&path)).map_err(|e| e.to_string())?);
    }
    ensure(docs[0] == docs[1], || "svg differs between runs".into())?;
    let points = curve_points(6000).map_err(|e| e.to_string())?;
    ensure(points.len() == 6000, || format!("{} points", points.len()))?;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    for p in &points {
        worst = worst.max(((p - prev).norm() - 1.0).abs());
        prev = *p;
    }
    ensure(worst <= 1e-12, || format!("step modulus off by {worst:e}"))?;
    Ok(format!(
        "6000 unit steps (worst {worst:.1e}), {} byte svg identical across runs",
        docs[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("side-pairing verification", side_pairings),
        ("region exchange", region_exchange),
        ("determinants and traces", determinants_and_traces),
        ("reduction", reduction),
        ("freeness and fixed-point probe", freeness_probe),
        ("word-count law", word_count_law),
        ("flat topology", flat_topology),
        ("hyperbolic subsurface", hyperbolic_subsurface),
        ("cone angles", cone_angles),
        ("geodesic invariants", geodesic_invariants),
        ("curve reproduction", curve_reproduction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                println!("FAIL {:>2} {name}: {reason}", i + 1);
                failed += 1;
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
