use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use lochness_core::group::region_exchange_report;
use lochness_core::render::{self, Complex64, View};
use lochness_core::slit::{Limit, TraceEvent};
use lochness_core::topology::{strip_polygon, topology_summary};
use lochness_core::{
    count_ends, probe_fixed_points, reduce_to_domain, truncation_topology, verify_side_pairings,
    EndBase, FlatPoint, GVariant, GeneralizedCircle, GeodesicTrace, SlitSurface, TopologySummary,
    TruncationSpec, UpperHalfPoint,
};
use serde_json::{json, Value};

use crate::cli::*;

/// The result of one command: a JSON report, its text rendering, and
/// whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub text: String,
    pub ok: bool,
}

impl Outcome {
    fn ok(report: Value, text: String) -> Self {
        Outcome {
            report,
            text,
            ok: true,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Hyp(HypCommand::Verify(a)) => verify(a),
        Command::Hyp(HypCommand::Reduce(a)) => reduce(a),
        Command::Hyp(HypCommand::Tessellate(a)) => tessellate(a),
        Command::Hyp(HypCommand::Domain(a)) => domain(a),
        Command::Hyp(HypCommand::Probe(a)) => probe(a),
        Command::Flat(FlatCommand::Trace(a)) => trace(a),
        Command::Flat(FlatCommand::Cone(a)) => cone(a),
        Command::Flat(FlatCommand::Render(a)) => flat_render(a),
        Command::Topo(TopoCommand::Truncation(a)) => truncation(a),
        Command::Topo(TopoCommand::Ends(a)) => ends(a),
        Command::Curve(a) => curve(a),
    }
}

fn circle_label(c: &GeneralizedCircle) -> String {
    match *c {
        GeneralizedCircle::Circle { center, radius }
            if (radius - 1.0).abs() < 1e-9 && (center - center.round()).abs() < 1e-9 =>
        {
            format!("C_{}", center.round() as i64)
        }
        _ => c.to_string(),
    }
}

fn variant_name(v: GVariant) -> &'static str {
    match v {
        GVariant::Printed => "printed",
        GVariant::Corrected => "corrected",
    }
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let variant: GVariant = a.variant.into();
    let report = verify_side_pairings(a.window as i64, variant, a.tol);
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &report.records {
        let (src, claimed, image) = (
            circle_label(&r.source),
            circle_label(&r.claimed_target),
            circle_label(&r.computed_image),
        );
        let _ = writeln!(
            text,
            "{:<8} {src:>6} -> {claimed:<6} image {image:<6} {}",
            r.letter.to_string(),
            if r.matches { "ok" } else { "MISMATCH" }
        );
        rows.push(json!({
            "letter": r.letter.to_string(),
            "source": src,
            "claimed_target": claimed,
            "computed_image": image,
            "matches": r.matches,
        }));
    }
    let total = report.records.len();
    let _ = writeln!(text, "pairings: {}/{} match", report.matched(), total);
    let mut ok = report.all_match();

    // region exchange is a property of the corrected generators only
    let exchange = if a.samples > 0 && variant == GVariant::Corrected {
        let ex = region_exchange_report(a.window as i64, a.samples, a.tol);
        let _ = writeln!(
            text,
            "region exchange: {} checks, {} violations",
            ex.checked,
            ex.violations.len()
        );
        ok &= ex.passed();
        json!({"samples_per_side": a.samples, "checked": ex.checked, "violations": ex.violations.len()})
    } else {
        Value::Null
    };

    Ok(Outcome {
        report: json!({
            "command": "hyp verify",
            "window": a.window,
            "variant": variant_name(variant),
            "tolerance": a.tol,
            "pairings": rows,
            "matched": report.matched(),
            "total": total,
            "region_exchange": exchange,
            "ok": ok,
        }),
        text,
        ok,
    })
}

fn reduce(a: &ReduceArgs) -> Result<Outcome> {
    let z = UpperHalfPoint::new(a.point.0, a.point.1)?;
    let r = reduce_to_domain(z, a.window as i64, a.tol, a.cap)?;
    let text = format!(
        "point: {z}\nword: {}\nsteps: {}\nresult: {}\n",
        r.word, r.steps, r.point
    );
    Ok(Outcome::ok(
        json!({
            "command": "hyp reduce",
            "window": a.window,
            "point": [z.re(), z.im()],
            "word": r.word.to_string(),
            "steps": r.steps,
            "result": [r.point.re(), r.point.im()],
        }),
        text,
    ))
}

fn view_from(arg: Option<ViewArg>, default: View, width: Option<f64>) -> Result<View> {
    let mut v = match arg {
        Some(ViewArg([x0, x1, y0, y1])) => View::new(x0, x1, y0, y1)?,
        None => default,
    };
    if let Some(w) = width {
        if !(w.is_finite() && w > 0.0) {
            bail!("width must be positive, got {w}");
        }
        v = v.with_width(w);
    }
    Ok(v)
}

fn tessellate(a: &TessellateArgs) -> Result<Outcome> {
    let view = view_from(a.view, View::tessellation(a.window), a.width)?;
    let s = render::render_tessellation_svg(a.window, a.depth, Some(view), a.clip, &a.out)?;
    let text = format!(
        "wrote {}\nbase circles: {}\narcs before clipping: {}\narcs drawn: {}\n",
        a.out.display(),
        s.circles,
        s.arcs_total,
        s.arcs_drawn
    );
    Ok(Outcome::ok(
        json!({
            "command": "hyp tessellate",
            "window": a.window,
            "depth": a.depth,
            "out": a.out.display().to_string(),
            "base_circles": s.circles,
            "arcs_total": s.arcs_total,
            "arcs_drawn": s.arcs_drawn,
        }),
        text,
    ))
}

fn domain(a: &DomainArgs) -> Result<Outcome> {
    let view = view_from(a.view, View::domain(a.window), a.width)?;
    let s = render::render_domain_svg(a.window, Some(view), &a.out)?;
    Ok(Outcome::ok(
        json!({
            "command": "hyp domain",
            "window": a.window,
            "out": a.out.display().to_string(),
            "circles": s.circles,
        }),
        format!("wrote {}\ncircles: {}\n", a.out.display(), s.circles),
    ))
}

fn probe(a: &ProbeArgs) -> Result<Outcome> {
    let p = probe_fixed_points(a.window as i64, a.depth, a.variant.into(), a.cap)?;
    let ok = p.words_distinct() && !p.interior_fixed_points_found() && p.all_fixed_points_real;
    let mut text = format!(
        "words: {}\nnon-identity elements: {}\ndistinct matrices: {}\nhyperbolic: {}\nparabolic: {}\nelliptic or identity: {}\nall fixed points real: {}\n",
        p.total_words,
        p.elements,
        p.distinct_matrices,
        p.hyperbolic,
        p.parabolic,
        p.offenders.len(),
        p.all_fixed_points_real
    );
    for o in p.offenders.iter().take(20) {
        let _ = writeln!(text, "  {} {} {}", o.kind, o.word, o.matrix);
    }
    let offenders: Vec<Value> = p
        .offenders
        .iter()
        .map(|o| json!({"word": o.word.to_string(), "kind": o.kind.to_string(), "matrix": o.matrix.to_string()}))
        .collect();
    Ok(Outcome {
        report: json!({
            "command": "hyp probe",
            "window": a.window,
            "depth": a.depth,
            "variant": variant_name(a.variant.into()),
            "words": p.total_words,
            "elements": p.elements,
            "distinct_matrices": p.distinct_matrices,
            "hyperbolic": p.hyperbolic,
            "parabolic": p.parabolic,
            "offenders": offenders,
            "all_fixed_points_real": p.all_fixed_points_real,
            "ok": ok,
        }),
        text,
        ok,
    })
}

fn flat_point(s: &SlitSurface, p: Pair, side: Option<SideArg>) -> Result<FlatPoint> {
    Ok(s.point(p.0, p.1, side.map(Into::into))?)
}

fn event_json(s: &SlitSurface, ev: &TraceEvent) -> Value {
    match ev {
        TraceEvent::Crossing {
            slit, entry, exit, ..
        } => {
            let (from, to) = (s.position(entry), s.position(exit));
            json!({"event": "crossing", "slit": slit, "entry": [from.0, from.1], "exit": [to.0, to.1]})
        }
        TraceEvent::Singularity { slit, at } => {
            json!({"event": "singularity", "slit": slit, "at": [at.0, at.1]})
        }
        TraceEvent::Limit { limit } => json!({
            "event": "limit",
            "limit": match limit { Limit::MaxEvents => "max_events", Limit::MaxLength => "max_length" },
        }),
    }
}

fn event_text(s: &SlitSurface, ev: &TraceEvent) -> String {
    match ev {
        TraceEvent::Crossing {
            slit, entry, exit, ..
        } => {
            let (from, to) = (s.position(entry), s.position(exit));
            format!(
                "cross l_{slit} at ({}, {}) -> ({}, {})",
                from.0, from.1, to.0, to.1
            )
        }
        TraceEvent::Singularity { slit, at } => {
            format!("cone point of l_{slit} at ({}, {})", at.0, at.1)
        }
        TraceEvent::Limit { limit } => match limit {
            Limit::MaxEvents => "stopped: event limit".into(),
            Limit::MaxLength => "stopped: length limit".into(),
        },
    }
}

fn trace_report(s: &SlitSurface, t: &GeodesicTrace) -> (Value, String) {
    let end = s.position(&t.end);
    let mut text = format!(
        "direction: ({}, {})\nlength: {}\nend: ({}, {})\n",
        t.direction.0, t.direction.1, t.length, end.0, end.1
    );
    for ev in &t.events {
        let _ = writeln!(text, "{}", event_text(s, ev));
    }
    let events: Vec<Value> = t.events.iter().map(|e| event_json(s, e)).collect();
    let polyline: Vec<Value> = t
        .polyline
        .iter()
        .map(|seg| json!([[seg.from.0, seg.from.1], [seg.to.0, seg.to.1]]))
        .collect();
    (
        json!({
            "direction": [t.direction.0, t.direction.1],
            "length": t.length,
            "end": [end.0, end.1],
            "events": events,
            "polyline": polyline,
        }),
        text,
    )
}

fn trace(a: &TraceArgs) -> Result<Outcome> {
    let s = SlitSurface::monster(a.k)?;
    let start = flat_point(&s, a.start, a.side)?;
    let t = s.trace_geodesic(start, (a.dir.0, a.dir.1), a.max_events, a.max_length)?;
    let (mut report, text) = trace_report(&s, &t);
    report["command"] = json!("flat trace");
    report["k"] = json!(a.k);
    Ok(Outcome::ok(report, text))
}

fn cone(a: &ConeArgs) -> Result<Outcome> {
    let s = SlitSurface::monster(a.k)?;
    if !(a.radius.is_finite() && a.radius > 0.0) {
        bail!("radius must be positive, got {}", a.radius);
    }
    // endpoints are addressed by position alone
    let p = if s.is_singular(a.point.0, a.point.1) {
        FlatPoint::Regular {
            x: a.point.0,
            y: a.point.1,
        }
    } else {
        flat_point(&s, a.point, a.side)?
    };
    let angle = s.cone_angle(&p, a.radius);
    let multiple = angle / std::f64::consts::PI;
    Ok(Outcome::ok(
        json!({
            "command": "flat cone",
            "k": a.k,
            "point": [a.point.0, a.point.1],
            "angle": angle,
            "angle_over_pi": multiple,
            "singular": s.is_singular(a.point.0, a.point.1),
        }),
        format!("cone angle: {angle} ({multiple:.6} pi)\n"),
    ))
}

fn flat_render(a: &FlatRenderArgs) -> Result<Outcome> {
    let s = SlitSurface::monster(a.k)?;
    let view = view_from(a.view, View::flat(a.k), a.width)?;
    let trace = match (a.start, a.dir) {
        (Some(start), Some(dir)) => {
            let p = flat_point(&s, start, a.side)?;
            Some(s.trace_geodesic(p, (dir.0, dir.1), a.max_events, a.max_length)?)
        }
        _ => None,
    };
    let summary = render::render_flat_svg(&s, trace.as_ref(), Some(view), &a.out)?;
    Ok(Outcome::ok(
        json!({
            "command": "flat render",
            "k": a.k,
            "out": a.out.display().to_string(),
            "slits": s.slits().len(),
            "segments": summary.segments,
            "jumps": summary.jumps,
        }),
        format!(
            "wrote {}\nslits: {}\ntrace segments: {}\njumps: {}\n",
            a.out.display(),
            s.slits().len(),
            summary.segments,
            summary.jumps
        ),
    ))
}

fn summary_json(s: &TopologySummary) -> Value {
    json!({
        "genus": s.genus,
        "boundary": s.boundary_components,
        "chi": s.euler_characteristic,
        "orientable": s.orientable,
    })
}

fn truncation(a: &TruncationArgs) -> Result<Outcome> {
    let (summary, mut report) = match a.model {
        Model::Flat => {
            let k = a.k.context("--k is required for the flat model")?;
            let spec = match a.radius {
                Some(radius) => TruncationSpec::Flat { pairs: k, radius },
                None => TruncationSpec::flat(k),
            };
            let TruncationSpec::Flat { radius, .. } = spec else {
                unreachable!()
            };
            (
                truncation_topology(&spec)?,
                json!({"model": "flat", "k": k, "radius": radius}),
            )
        }
        Model::Hyp => {
            let m = a.m.context("--m is required for the hyperbolic model")?;
            let summary = match GVariant::from(a.variant) {
                GVariant::Corrected => truncation_topology(&TruncationSpec::Hyperbolic { m })?,
                v => topology_summary(&strip_polygon(m, v)?)?,
            };
            (
                summary,
                json!({"model": "hyp", "m": m, "variant": variant_name(a.variant.into())}),
            )
        }
    };
    report["command"] = json!("topo truncation");
    report["summary"] = summary_json(&summary);
    Ok(Outcome::ok(report, format!("{summary}\n")))
}

fn ends(a: &EndsArgs) -> Result<Outcome> {
    let base = match a.base {
        BaseKind::Plane => EndBase::Plane,
        BaseKind::Cylinder => EndBase::Cylinder {
            circumference: a.circumference.unwrap_or(8 * a.k as u32 + 8),
        },
    };
    let n = count_ends(base, a.k, a.levels)?;
    let base_json = match base {
        EndBase::Plane => json!("plane"),
        EndBase::Cylinder { circumference } => json!({"cylinder": circumference}),
    };
    Ok(Outcome::ok(
        json!({"command": "topo ends", "base": base_json, "k": a.k, "levels": a.levels, "ends": n}),
        format!("ends: {n}\n"),
    ))
}

fn curve(a: &CurveArgs) -> Result<Outcome> {
    let points = render::render_curve_svg(a.n, &a.out)?;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    for p in &points {
        worst = worst.max(((p - prev).norm() - 1.0).abs());
        prev = *p;
    }
    let last = points.last().expect("at least one point");
    Ok(Outcome::ok(
        json!({
            "command": "curve",
            "n": a.n,
            "out": a.out.display().to_string(),
            "points": points.len(),
            "final": [last.re, last.im],
            "max_step_error": worst,
        }),
        format!(
            "wrote {}\npoints: {}\nfinal: {} + {}i\nmax | |step| - 1 |: {worst:e}\n",
            a.out.display(),
            points.len(),
            last.re,
            last.im
        ),
    ))
}
