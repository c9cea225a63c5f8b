//! The slit-plane translation surface.
//!
//! The plane (or a cylinder) is cut along the horizontal segments
//! `l_i = [4i − 1, 4i] × {0}` for `i = 1..=2k`, and `l_{2i−1}` is glued to
//! `l_{2i}` by translation: the upper side of the odd slit to the lower side
//! of the even one and vice versa. Each glued pair adds a handle; the slit
//! endpoints become cone points of angle `4π`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Offsets closer than this to a slit end count as hitting the cone point.
pub const ENDPOINT_TOL: f64 = 1e-9;
/// Default loop radius for [`SlitSurface::cone_angle`].
pub const DEFAULT_CONE_RADIUS: f64 = 1e-3;

const AXIS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlitError {
    #[error("a monster surface needs at least one glued pair of slits")]
    NoPairs,
    #[error("cylinder circumference must be positive and finite, got {0}")]
    BadCircumference(f64),
    #[error("slit l_{0} straddles the cylinder seam")]
    StraddlesSeam(usize),
    #[error("slits l_{0} and l_{1} overlap on the cylinder")]
    Overlap(usize, usize),
    #[error("({x}, {y}) is a slit endpoint (cone point)")]
    SingularPoint { x: f64, y: f64 },
    #[error("geodesic cannot start at the cone point ({x}, {y})")]
    SingularStart { x: f64, y: f64 },
    #[error("point ({x}, {y}) lies on a slit; its side must be given")]
    MissingSide { x: f64, y: f64 },
    #[error("point ({x}, {y}) is not on any slit")]
    NotOnSlit { x: f64, y: f64 },
    #[error("direction must be a nonzero finite vector")]
    BadDirection,
    #[error("maximum length must be positive")]
    BadLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Base {
    Plane,
    Cylinder { circumference: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }
}

/// A point of the cut surface.
///
/// Points on a slit are stored by slit index and offset along it so that
/// gluing is an exact index change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlatPoint {
    Regular {
        x: f64,
        y: f64,
    },
    OnSlit {
        slit: usize,
        offset: f64,
        side: Side,
    },
}

impl FlatPoint {
    pub fn side(&self) -> Option<Side> {
        match self {
            FlatPoint::Regular { .. } => None,
            FlatPoint::OnSlit { side, .. } => Some(*side),
        }
    }
}

/// A straight segment of horizontal extent `[left, left + 1]` on `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Slit {
    pub index: usize,
    pub left: f64,
}

impl Slit {
    pub fn right(&self) -> f64 {
        self.left + 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlitSurface {
    base: Base,
    slits: Vec<Slit>,
}

impl SlitSurface {
    /// The plane with `k ≥ 1` glued slit pairs, `l_1 … l_{2k}`.
    pub fn monster(k: usize) -> Result<Self, SlitError> {
        if k == 0 {
            return Err(SlitError::NoPairs);
        }
        Ok(SlitSurface {
            base: Base::Plane,
            slits: Self::generate(k),
        })
    }

    /// The bare plane.
    pub fn plane() -> Self {
        SlitSurface {
            base: Base::Plane,
            slits: Vec::new(),
        }
    }

    /// A cylinder of the given circumference carrying `k` slit pairs, placed
    /// by the same rule and wrapped around the seam at `x = 0`.
    pub fn cylinder(k: usize, circumference: f64) -> Result<Self, SlitError> {
        if !(circumference.is_finite() && circumference > 0.0) {
            return Err(SlitError::BadCircumference(circumference));
        }
        let mut slits = Self::generate(k);
        for s in &mut slits {
            s.left = s.left.rem_euclid(circumference);
            if s.right() > circumference {
                return Err(SlitError::StraddlesSeam(s.index));
            }
        }
        for (i, a) in slits.iter().enumerate() {
            for b in &slits[i + 1..] {
                if a.left <= b.right() && b.left <= a.right() {
                    return Err(SlitError::Overlap(a.index, b.index));
                }
            }
        }
        Ok(SlitSurface {
            base: Base::Cylinder { circumference },
            slits,
        })
    }

    fn generate(k: usize) -> Vec<Slit> {
        (1..=2 * k)
            .map(|index| Slit {
                index,
                left: (4 * index - 1) as f64,
            })
            .collect()
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn pairs(&self) -> usize {
        self.slits.len() / 2
    }

    pub fn slits(&self) -> &[Slit] {
        &self.slits
    }

    /// Slit by 1-based index.
    pub fn slit(&self, index: usize) -> &Slit {
        &self.slits[index - 1]
    }

    /// `l_{2i−1} ↔ l_{2i}`.
    pub fn partner(index: usize) -> usize {
        if index % 2 == 1 {
            index + 1
        } else {
            index - 1
        }
    }

    fn wrap(&self, x: f64) -> f64 {
        match self.base {
            Base::Plane => x,
            Base::Cylinder { circumference } => x.rem_euclid(circumference),
        }
    }

    /// Plane coordinates of a point.
    pub fn position(&self, p: &FlatPoint) -> (f64, f64) {
        match *p {
            FlatPoint::Regular { x, y } => (x, y),
            FlatPoint::OnSlit { slit, offset, .. } => (self.slit(slit).left + offset, 0.0),
        }
    }

    /// The slit whose closed span contains `x` on the axis, with the offset.
    fn slit_at(&self, x: f64) -> Option<(usize, f64)> {
        let x = self.wrap(x);
        self.slits.iter().find_map(|s| {
            let u = x - s.left;
            (-ENDPOINT_TOL..=1.0 + ENDPOINT_TOL)
                .contains(&u)
                .then_some((s.index, u))
        })
    }

    fn is_endpoint_offset(u: f64) -> bool {
        u <= ENDPOINT_TOL || u >= 1.0 - ENDPOINT_TOL
    }

    /// Whether `(x, y)` is a slit endpoint.
    pub fn is_singular(&self, x: f64, y: f64) -> bool {
        y.abs() <= AXIS_TOL
            && matches!(self.slit_at(x), Some((_, u)) if Self::is_endpoint_offset(u))
    }

    /// Builds a point from plane coordinates. A point on a slit needs its
    /// side; a side given off the slits is rejected.
    pub fn point(&self, x: f64, y: f64, side: Option<Side>) -> Result<FlatPoint, SlitError> {
        let on_axis = y.abs() <= AXIS_TOL;
        match (on_axis.then(|| self.slit_at(x)).flatten(), side) {
            (Some((_, u)), _) if Self::is_endpoint_offset(u) => {
                Ok(FlatPoint::Regular { x, y: 0.0 })
            }
            (Some((slit, offset)), Some(side)) => Ok(FlatPoint::OnSlit { slit, offset, side }),
            (Some(_), None) => Err(SlitError::MissingSide { x, y }),
            (None, Some(_)) => Err(SlitError::NotOnSlit { x, y }),
            (None, None) => Ok(FlatPoint::Regular { x: self.wrap(x), y }),
        }
    }

    /// The gluing map: the given side of a slit is identified with the
    /// opposite side of its partner at the same offset. An involution.
    pub fn glue(&self, p: FlatPoint) -> Result<FlatPoint, SlitError> {
        match p {
            FlatPoint::OnSlit { slit, offset, side } => {
                if Self::is_endpoint_offset(offset) {
                    let (x, y) = self.position(&p);
                    return Err(SlitError::SingularPoint { x, y });
                }
                Ok(FlatPoint::OnSlit {
                    slit: Self::partner(slit),
                    offset,
                    side: side.flip(),
                })
            }
            FlatPoint::Regular { x, y } => {
                if self.is_singular(x, y) {
                    Err(SlitError::SingularPoint { x, y })
                } else {
                    Err(SlitError::NotOnSlit { x, y })
                }
            }
        }
    }

    /// Where a path meeting the slit at `p` continues. Moving down, the
    /// path meets the upper side; moving up, the lower side.
    pub fn resolve_crossing(
        &self,
        p: FlatPoint,
        heading_down: bool,
    ) -> Result<FlatPoint, SlitError> {
        let hit = if heading_down {
            Side::Upper
        } else {
            Side::Lower
        };
        let on_slit = match p {
            FlatPoint::OnSlit { slit, offset, .. } => FlatPoint::OnSlit {
                slit,
                offset,
                side: hit,
            },
            FlatPoint::Regular { x, y } => self.point(x, y, Some(hit))?,
        };
        self.glue(on_slit)
    }

    /// Follows the straight line from `start` in `direction`, jumping through
    /// slit gluings, until `max_events` crossings or singularities, a total
    /// length of `max_length`, or a cone point.
    pub fn trace_geodesic(
        &self,
        start: FlatPoint,
        direction: (f64, f64),
        max_events: usize,
        max_length: f64,
    ) -> Result<GeodesicTrace, SlitError> {
        let norm = direction.0.hypot(direction.1);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SlitError::BadDirection);
        }
        if max_length.is_nan() || max_length <= 0.0 {
            return Err(SlitError::BadLength);
        }
        let (dx, dy) = (direction.0 / norm, direction.1 / norm);
        let start = match start {
            FlatPoint::Regular { x, y } => {
                if self.is_singular(x, y) {
                    return Err(SlitError::SingularStart { x, y });
                }
                self.point(x, y, None)?
            }
            FlatPoint::OnSlit { offset, .. } if Self::is_endpoint_offset(offset) => {
                let (x, y) = self.position(&start);
                return Err(SlitError::SingularStart { x, y });
            }
            p => p,
        };

        let mut tracer = Tracer {
            surface: self,
            here: start,
            dir: (dx, dy),
            travelled: 0.0,
            max_length,
            events: Vec::new(),
            polyline: Vec::new(),
        };
        tracer.run(max_events);
        Ok(GeodesicTrace {
            start,
            direction: (dx, dy),
            end: tracer.here,
            length: tracer.travelled,
            events: tracer.events,
            polyline: tracer.polyline,
        })
    }

    /// Total angle around `p`, found by developing a loop of radius
    /// `radius` through the gluings until it closes up in the starting chart.
    pub fn cone_angle(&self, p: &FlatPoint, radius: f64) -> f64 {
        let (x0, y0) = self.position(p);
        // the loop meets y = 0 where sin θ = −y0 / r
        let mut crossings: Vec<f64> = Vec::new();
        if y0.abs() < radius {
            let a = (-y0 / radius).asin();
            crossings.push(a.rem_euclid(TAU));
            crossings.push((PI - a).rem_euclid(TAU));
        }
        // start away from any crossing angle
        let theta0 = crossings.iter().fold(0.5 * PI + 0.1234, |t, c| {
            if (t - c).abs() < 1e-3 {
                t + 0.01
            } else {
                t
            }
        });
        let mut schedule: Vec<f64> = crossings
            .iter()
            .map(|c| if *c <= theta0 { c + TAU } else { *c })
            .collect();
        schedule.sort_by(f64::total_cmp);
        schedule.dedup();

        let mut cx = x0;
        let mut chart: i64 = 0;
        let mut total = 0.0;
        for _ in 0..64 {
            for &phi in &schedule {
                let x = cx + radius * phi.cos();
                let Some((slit, u)) = self.slit_at(x) else {
                    continue;
                };
                if u <= 0.0 || u >= 1.0 {
                    continue;
                }
                if phi.cos() == 0.0 {
                    // tangent to the axis, no crossing
                    continue;
                }
                // either side of `slit` is glued to its partner, same shift
                let partner = Self::partner(slit);
                cx += self.slit(partner).left - self.slit(slit).left;
                chart += partner as i64 - slit as i64;
            }
            total += TAU;
            if chart == 0 {
                return total;
            }
        }
        f64::INFINITY
    }
}

/// Why a trace stopped, when not at a cone point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    MaxEvents,
    MaxLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Met `entry` (a side of `slit`) and continued from `exit` on the partner.
    Crossing {
        slit: usize,
        entry: FlatPoint,
        exit: FlatPoint,
        direction: (f64, f64),
    },
    /// Ran into an endpoint of `slit`.
    Singularity {
        slit: usize,
        at: (f64, f64),
    },
    Limit {
        limit: Limit,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub from: (f64, f64),
    pub to: (f64, f64),
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.to.0 - self.from.0).hypot(self.to.1 - self.from.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicTrace {
    pub start: FlatPoint,
    pub direction: (f64, f64),
    pub end: FlatPoint,
    /// Parameter length travelled.
    pub length: f64,
    pub events: Vec<TraceEvent>,
    pub polyline: Vec<Segment>,
}

impl GeodesicTrace {
    pub fn crossings(&self) -> impl Iterator<Item = &TraceEvent> {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Crossing { .. }))
    }

    pub fn polyline_length(&self) -> f64 {
        self.polyline.iter().map(Segment::length).sum()
    }

    pub fn hit_singularity(&self) -> bool {
        matches!(self.events.last(), Some(TraceEvent::Singularity { .. }))
    }
}

struct Tracer<'a> {
    surface: &'a SlitSurface,
    here: FlatPoint,
    dir: (f64, f64),
    travelled: f64,
    max_length: f64,
    events: Vec<TraceEvent>,
    polyline: Vec<Segment>,
}

enum Next {
    Cross(FlatPoint),
    Singular(usize, (f64, f64)),
}

impl Tracer<'_> {
    fn run(&mut self, max_events: usize) {
        let mut counted = 0;
        loop {
            if counted >= max_events {
                self.events.push(TraceEvent::Limit {
                    limit: Limit::MaxEvents,
                });
                return;
            }
            let remaining = self.max_length - self.travelled;
            match self.next_event(remaining) {
                Some((dist, Next::Cross(entry))) => {
                    self.advance_to(dist, entry);
                    let exit = self
                        .surface
                        .glue(entry)
                        .expect("crossing points avoid slit endpoints");
                    self.events.push(TraceEvent::Crossing {
                        slit: match entry {
                            FlatPoint::OnSlit { slit, .. } => slit,
                            FlatPoint::Regular { .. } => unreachable!(),
                        },
                        entry,
                        exit,
                        direction: self.dir,
                    });
                    self.here = exit;
                    counted += 1;
                }
                Some((dist, Next::Singular(slit, at))) => {
                    let at_point = FlatPoint::Regular { x: at.0, y: at.1 };
                    self.advance_to(dist, at_point);
                    self.events.push(TraceEvent::Singularity { slit, at });
                    return;
                }
                None => {
                    let (x, y) = self.surface.position(&self.here);
                    let end = (x + remaining * self.dir.0, y + remaining * self.dir.1);
                    self.push_segment((x, y), end);
                    self.travelled = self.max_length;
                    self.here = FlatPoint::Regular {
                        x: self.surface.wrap(end.0),
                        y: end.1,
                    };
                    self.events.push(TraceEvent::Limit {
                        limit: Limit::MaxLength,
                    });
                    return;
                }
            }
        }
    }

    fn advance_to(&mut self, dist: f64, to: FlatPoint) {
        let from = self.surface.position(&self.here);
        let (tx, ty) = self.surface.position(&to);
        // draw in the unwrapped frame of the start so the seam split works
        let unwrapped = (from.0 + dist * self.dir.0, from.1 + dist * self.dir.1);
        let target = if matches!(self.surface.base, Base::Plane) {
            (tx, ty)
        } else {
            (unwrapped.0, ty)
        };
        if dist > 0.0 {
            self.push_segment(from, target);
        }
        self.travelled += dist;
        self.here = to;
    }

    /// Appends a segment, cutting it at the cylinder seam when needed.
    fn push_segment(&mut self, from: (f64, f64), to: (f64, f64)) {
        let Base::Cylinder { circumference } = self.surface.base else {
            self.polyline.push(Segment { from, to });
            return;
        };
        let (mut a, b) = (from, to);
        let shift = a.0 - a.0.rem_euclid(circumference);
        a.0 -= shift;
        let mut b = (b.0 - shift, b.1);
        loop {
            let seam = if b.0 > circumference {
                Some((circumference, 0.0))
            } else if b.0 < 0.0 {
                Some((0.0, circumference))
            } else {
                None
            };
            match seam {
                Some((cut, restart)) if (b.0 - a.0).abs() > 0.0 => {
                    let s = (cut - a.0) / (b.0 - a.0);
                    let y = a.1 + s * (b.1 - a.1);
                    self.polyline.push(Segment {
                        from: a,
                        to: (cut, y),
                    });
                    let dx = restart - cut;
                    a = (restart, y);
                    b = (b.0 + dx, b.1);
                }
                _ => {
                    self.polyline.push(Segment { from: a, to: b });
                    return;
                }
            }
        }
    }

    /// The next crossing or cone point within `remaining`, as (distance, what).
    fn next_event(&self, remaining: f64) -> Option<(f64, Next)> {
        let s = self.surface;
        let (dx, dy) = self.dir;
        if let FlatPoint::OnSlit { slit, offset, side } = self.here {
            let into = match side {
                Side::Upper => dy < 0.0,
                Side::Lower => dy > 0.0,
            };
            if into {
                return Some((0.0, Next::Cross(self.here)));
            }
            if dy == 0.0 {
                // sliding along the slit to one of its ends
                let (dist, end) = if dx > 0.0 {
                    (1.0 - offset, 1.0)
                } else {
                    (offset, 0.0)
                };
                let x = s.slit(slit).left + end;
                return (dist <= remaining).then_some((dist, Next::Singular(slit, (x, 0.0))));
            }
            return None;
        }
        let (x, y) = s.position(&self.here);
        if dy == 0.0 {
            if y.abs() > AXIS_TOL {
                return None;
            }
            // running along the axis between slits: first endpoint ahead
            return s
                .slits
                .iter()
                .flat_map(|sl| [(sl.index, sl.left), (sl.index, sl.right())])
                .filter_map(|(i, ex)| {
                    let d = match s.base {
                        Base::Plane => (ex - x) * dx.signum(),
                        Base::Cylinder { circumference } => {
                            ((ex - x) * dx.signum()).rem_euclid(circumference)
                        }
                    };
                    (d > 0.0 && d <= remaining).then_some((d, i, ex))
                })
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(d, i, ex)| (d, Next::Singular(i, (ex, 0.0))));
        }
        let dist = -y / dy;
        if dist.is_nan() || dist <= 0.0 || dist > remaining {
            return None;
        }
        let xc = x + dist * dx;
        let (slit, u) = s.slit_at(xc)?;
        if SlitSurface::is_endpoint_offset(u) {
            let end = if u < 0.5 { 0.0 } else { 1.0 };
            return Some((dist, Next::Singular(slit, (s.slit(slit).left + end, 0.0))));
        }
        let side = if dy < 0.0 { Side::Upper } else { Side::Lower };
        Some((
            dist,
            Next::Cross(FlatPoint::OnSlit {
                slit,
                offset: u,
                side,
            }),
        ))
    }
}
