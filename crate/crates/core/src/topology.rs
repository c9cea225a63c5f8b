//! Combinatorial topology of the truncated surfaces.
//!
//! A compact piece of either model is encoded as a single polygon whose
//! boundary word pairs some edges and leaves the rest as boundary. Vertex
//! classes, boundary cycles and the Euler characteristic follow by exact
//! counting. Ends are counted on a unit-cell grid of the base surface.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GVariant, GeneratorLetter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TopologyError {
    #[error("malformed boundary word: {0}")]
    MalformedWord(String),
    #[error("the circle C_{center} is the target of more than one pairing")]
    ArcPairedTwice { center: i64 },
    #[error("the image of C_{circle} under {letter} is not a circle of the strip")]
    PairingLeavesStrip { circle: i64, letter: String },
    #[error("truncation radius {radius} does not enclose the {slits} slits (needs > {needed})")]
    RadiusTooSmall {
        radius: u64,
        slits: usize,
        needed: u64,
    },
    #[error("end counting needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("cylinder circumference {circumference} cannot hold {pairs} slit pairs")]
    CylinderTooSmall { circumference: u32, pairs: usize },
    #[error("component count still changing at the last level: {counts:?}")]
    NotStabilized { counts: Vec<usize> },
    #[error("counts V={v} E={e} F={f} with {b} boundary components give no integral genus")]
    NonIntegralGenus {
        v: usize,
        e: usize,
        f: usize,
        b: usize,
    },
}

/// One side of the polygon, traversed counter-clockwise. `inverted` marks
/// that the label's own direction runs against the traversal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub label: String,
    pub inverted: bool,
}

impl Edge {
    pub fn new(label: impl Into<String>) -> Self {
        Edge {
            label: label.into(),
            inverted: false,
        }
    }

    pub fn inv(label: impl Into<String>) -> Self {
        Edge {
            label: label.into(),
            inverted: true,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "{}^-1", self.label)
        } else {
            f.write_str(&self.label)
        }
    }
}

/// A polygon with a cyclic boundary word. A label used twice is glued
/// (orientably, so the two uses must have opposite flags); a label used once
/// is boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifiedPolygon {
    edges: Vec<Edge>,
}

impl IdentifiedPolygon {
    pub fn new(edges: Vec<Edge>) -> Result<Self, TopologyError> {
        if edges.is_empty() {
            return Err(TopologyError::MalformedWord("empty boundary word".into()));
        }
        let mut seen: HashMap<&str, Vec<bool>> = HashMap::new();
        for e in &edges {
            seen.entry(&e.label).or_default().push(e.inverted);
        }
        for (label, flags) in &seen {
            match flags.as_slice() {
                [_] => {}
                [a, b] if a != b => {}
                [_, _] => {
                    return Err(TopologyError::MalformedWord(format!(
                        "label {label} is glued with matching orientations (non-orientable)"
                    )))
                }
                _ => {
                    return Err(TopologyError::MalformedWord(format!(
                        "label {label} appears {} times",
                        flags.len()
                    )))
                }
            }
        }
        Ok(IdentifiedPolygon { edges })
    }

    /// Parses a whitespace-separated word such as `a b a^-1 b^-1`; `a'` is
    /// accepted for `a^-1`.
    pub fn parse(word: &str) -> Result<Self, TopologyError> {
        let edges = word
            .split_whitespace()
            .map(|tok| {
                if let Some(l) = tok.strip_suffix("^-1").or_else(|| tok.strip_suffix('\'')) {
                    Edge::inv(l)
                } else {
                    Edge::new(tok)
                }
            })
            .collect();
        Self::new(edges)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Position of the other occurrence of each edge's label, if glued.
    fn partners(&self) -> Vec<Option<usize>> {
        let mut first: HashMap<&str, usize> = HashMap::new();
        let mut out = vec![None; self.edges.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(&j) = first.get(e.label.as_str()) {
                out[i] = Some(j);
                out[j] = Some(i);
            } else {
                first.insert(&e.label, i);
            }
        }
        out
    }
}

impl fmt::Display for IdentifiedPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Cell counts after gluing. `vertex_cycles` lists, for each vertex, the
/// polygon corners identified to it (corner `i` starts edge `i`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellComplex {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub vertex_cycles: Vec<Vec<usize>>,
}

impl CellComplex {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub euler_characteristic: i64,
    pub genus: u64,
    pub boundary_components: u64,
    pub orientable: bool,
}

impl fmt::Display for TopologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "genus={} boundary={} chi={} orientable={}",
            self.genus, self.boundary_components, self.euler_characteristic, self.orientable
        )
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Vertex classes by identifying corners along glued edges.
pub fn complex_from_polygon(p: &IdentifiedPolygon) -> CellComplex {
    let n = p.edges.len();
    let mut uf = UnionFind::new(n);
    // tail and head corners of edge i, in the label's own direction
    let ends = |i: usize| {
        let (s, t) = (i, (i + 1) % n);
        if p.edges[i].inverted {
            (t, s)
        } else {
            (s, t)
        }
    };
    for (i, partner) in p.partners().into_iter().enumerate() {
        if let Some(j) = partner.filter(|&j| j > i) {
            let (ti, hi) = ends(i);
            let (tj, hj) = ends(j);
            uf.union(ti, tj);
            uf.union(hi, hj);
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..n {
        classes.entry(uf.find(c)).or_default().push(c);
    }
    let labels: std::collections::HashSet<&str> =
        p.edges.iter().map(|e| e.label.as_str()).collect();
    CellComplex {
        vertices: classes.len(),
        edges: labels.len(),
        faces: 1,
        vertex_cycles: classes.into_values().collect(),
    }
}

/// Number of boundary circles: follow each unpaired edge to the next one
/// around the shared vertex, jumping across glued edges.
fn boundary_cycles(p: &IdentifiedPolygon) -> usize {
    let n = p.edges.len();
    let partners = p.partners();
    let next_boundary = |e: usize| {
        let mut c = (e + 1) % n;
        // corner c starts edge c; across a glued edge c ~ j the corner c
        // matches the end of j, i.e. corner j + 1
        for _ in 0..=n {
            match partners[c] {
                None => return c,
                Some(j) => c = (j + 1) % n,
            }
        }
        unreachable!("vertex link walk did not return to the boundary")
    };
    let mut visited = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if partners[start].is_some() || visited[start] {
            continue;
        }
        cycles += 1;
        let mut e = start;
        while !visited[e] {
            visited[e] = true;
            e = next_boundary(e);
        }
    }
    cycles
}

/// Euler characteristic, boundary count and genus of the glued polygon.
pub fn topology_summary(p: &IdentifiedPolygon) -> Result<TopologySummary, TopologyError> {
    let cx = complex_from_polygon(p);
    let chi = cx.euler_characteristic();
    let b = boundary_cycles(p);
    let twice_genus = 2 - b as i64 - chi;
    if twice_genus < 0 || twice_genus % 2 != 0 {
        return Err(TopologyError::NonIntegralGenus {
            v: cx.vertices,
            e: cx.edges,
            f: cx.faces,
            b,
        });
    }
    Ok(TopologySummary {
        euler_characteristic: chi,
        genus: (twice_genus / 2) as u64,
        boundary_components: b as u64,
        orientable: true,
    })
}

/// A compact piece of one of the two models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TruncationSpec {
    /// The disk of the given radius around the origin in the slit plane,
    /// containing the first `pairs` glued slit pairs.
    Flat { pairs: usize, radius: u64 },
    /// The subregion of the fundamental domain over the strip
    /// `16m − 2 < Re z < 16m + 14`, capped at a fixed height.
    Hyperbolic { m: i64 },
}

impl TruncationSpec {
    /// Flat truncation with the smallest integral radius `8k + 4`.
    pub fn flat(pairs: usize) -> Self {
        TruncationSpec::Flat {
            pairs,
            radius: 8 * pairs as u64 + 4,
        }
    }
}

/// The disk cut along a path through all `2k` slits and opened into one
/// polygon.
///
/// Bridges `b_0` (disk edge to `l_1`) and `b_i` (`l_i` to `l_{i+1}`) are
/// auxiliary cuts glued straight back. For each pair, `u_i` is the upper
/// side of `l_{2i−1}` (= lower side of `l_{2i}`) and `v_i` the lower side of
/// `l_{2i−1}` (= upper side of `l_{2i}`), all directed along `+x`.
pub fn flat_truncation_polygon(
    pairs: usize,
    radius: u64,
) -> Result<IdentifiedPolygon, TopologyError> {
    let needed = 8 * pairs as u64;
    if radius <= needed {
        return Err(TopologyError::RadiusTooSmall {
            radius,
            slits: 2 * pairs,
            needed,
        });
    }
    let slit_side = |i: usize, upper: bool| {
        let pair = i.div_ceil(2);
        let odd = i % 2 == 1;
        // upper-of-odd and lower-of-even are one edge
        if upper == odd {
            format!("u{pair}")
        } else {
            format!("v{pair}")
        }
    };
    let mut edges = vec![Edge::new("disk")];
    if pairs == 0 {
        return IdentifiedPolygon::new(edges);
    }
    let n = 2 * pairs;
    // upper sides, left to right
    edges.push(Edge::new("b0"));
    for i in 1..=n {
        edges.push(Edge::new(slit_side(i, true)));
        if i < n {
            edges.push(Edge::new(format!("b{i}")));
        }
    }
    // lower sides, right to left
    for i in (1..=n).rev() {
        edges.push(Edge::inv(slit_side(i, false)));
        edges.push(Edge::inv(format!("b{}", i - 1)));
    }
    IdentifiedPolygon::new(edges)
}

fn maps_to(t: &crate::mobius::MobiusMap, x: i64, y: i64) -> bool {
    // (a x + b) = y (c x + d), exactly
    let (x, y) = (BigInt::from(x), BigInt::from(y));
    t.a() * &x + t.b() == &y * (t.c() * &x + t.d())
}

/// Boundary of the strip piece of the fundamental domain: real-axis
/// segments `s0..s4` alternating with the four arcs (each traversed left to
/// right), then the right side, a horizontal cap and the left side. Arc
/// labels and orientations come from where the generators actually send the
/// arc endpoints.
pub fn strip_polygon(m: i64, variant: GVariant) -> Result<IdentifiedPolygon, TopologyError> {
    let centers: Vec<i64> = (0..4).map(|j| 16 * m + 4 * j).collect();
    let mut arcs: BTreeMap<i64, Edge> = BTreeMap::new();
    for letter in [GeneratorLetter::f(m), GeneratorLetter::g(m)] {
        let (source, _) = letter.source_and_target();
        let t = letter.matrix(variant);
        let label = letter.to_string();
        let image = centers.iter().find_map(|&c| {
            if maps_to(&t, source - 1, c - 1) && maps_to(&t, source + 1, c + 1) {
                Some((c, false))
            } else if maps_to(&t, source - 1, c + 1) && maps_to(&t, source + 1, c - 1) {
                Some((c, true))
            } else {
                None
            }
        });
        let Some((target, reversed)) = image else {
            return Err(TopologyError::PairingLeavesStrip {
                circle: source,
                letter: label,
            });
        };
        for (center, edge) in [
            (source, Edge::new(label.clone())),
            // traversing the target left to right runs against the image
            // of the source's direction exactly when the map reverses it
            (
                target,
                Edge {
                    label: label.clone(),
                    inverted: reversed,
                },
            ),
        ] {
            if arcs.insert(center, edge).is_some() {
                return Err(TopologyError::ArcPairedTwice { center });
            }
        }
    }
    let mut edges = Vec::new();
    for (j, c) in centers.iter().enumerate() {
        edges.push(Edge::new(format!("s{j}")));
        edges.push(arcs[c].clone());
    }
    edges.push(Edge::new("s4"));
    edges.push(Edge::new("right"));
    edges.push(Edge::new("cap"));
    edges.push(Edge::new("left"));
    IdentifiedPolygon::new(edges)
}

/// Topology of a flat or hyperbolic truncation.
pub fn truncation_topology(t: &TruncationSpec) -> Result<TopologySummary, TopologyError> {
    let poly = match *t {
        TruncationSpec::Flat { pairs, radius } => flat_truncation_polygon(pairs, radius)?,
        TruncationSpec::Hyperbolic { m } => strip_polygon(m, GVariant::Corrected)?,
    };
    topology_summary(&poly)
}

/// Base surface for end counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndBase {
    Plane,
    Cylinder { circumference: u32 },
}

/// Unit cells `[x, x+1] × [y, y+1]` of the base with slits on `y = 0`.
struct CellGrid {
    base: EndBase,
    /// slit index → cell column it covers
    slit_columns: Vec<i64>,
}

impl CellGrid {
    fn new(base: EndBase, pairs: usize) -> Result<Self, TopologyError> {
        let mut slit_columns: Vec<i64> = (1..=2 * pairs as i64).map(|i| 4 * i - 1).collect();
        if let EndBase::Cylinder { circumference } = base {
            let c = circumference as i64;
            for col in &mut slit_columns {
                *col = col.rem_euclid(c);
            }
            let mut sorted = slit_columns.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if c == 0 || sorted.len() != slit_columns.len() {
                return Err(TopologyError::CylinderTooSmall {
                    circumference,
                    pairs,
                });
            }
        }
        Ok(CellGrid { base, slit_columns })
    }

    fn in_truncation(&self, x: i64, y: i64, r: i64) -> bool {
        match self.base {
            EndBase::Plane => (-r..r).contains(&x) && (-r..r).contains(&y),
            EndBase::Cylinder { .. } => (-r..r).contains(&y),
        }
    }

    fn columns(&self, r: i64) -> std::ops::Range<i64> {
        match self.base {
            EndBase::Plane => -r..r,
            EndBase::Cylinder { circumference } => 0..circumference as i64,
        }
    }

    fn right_neighbour(&self, x: i64) -> Option<i64> {
        match self.base {
            EndBase::Plane => Some(x + 1),
            EndBase::Cylinder { circumference } => Some((x + 1).rem_euclid(circumference as i64)),
        }
    }

    /// Components of `K_outer \ K_inner` that reach the outer frontier.
    fn escaping_components(&self, inner: i64, outer: i64) -> usize {
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        for x in self.columns(outer) {
            for y in -outer..outer {
                if !self.in_truncation(x, y, inner) {
                    let n = index.len();
                    index.insert((x, y), n);
                }
            }
        }
        let mut uf = UnionFind::new(index.len());
        let slit_at = |x: i64| self.slit_columns.iter().position(|&c| c == x);
        for (&(x, y), &id) in &index {
            if let Some(&r) = self.right_neighbour(x).and_then(|nx| index.get(&(nx, y))) {
                uf.union(id, r);
            }
            if let Some(&up) = index.get(&(x, y + 1)) {
                // the line y = 0 between rows −1 and 0 is cut along the slits
                if y != -1 || slit_at(x).is_none() {
                    uf.union(id, up);
                }
            }
            if y == 0 {
                if let Some(i) = slit_at(x) {
                    // above l_i continues below its partner
                    let partner = if i % 2 == 0 { i + 1 } else { i - 1 };
                    let px = self.slit_columns[partner];
                    if let Some(&below) = index.get(&(px, -1)) {
                        uf.union(id, below);
                    }
                }
            }
        }
        let frontier = |x: i64, y: i64| match self.base {
            EndBase::Plane => x == -outer || x == outer - 1 || y == -outer || y == outer - 1,
            EndBase::Cylinder { .. } => y == -outer || y == outer - 1,
        };
        let mut roots: Vec<usize> = index
            .iter()
            .filter(|(&(x, y), _)| frontier(x, y))
            .map(|(_, &id)| uf.find(id))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

/// Counts ends from the given starting radius: at each of `levels` nested
/// annuli `K_{r_j} \ K_{r_{j−1}}` (radii `r0, r0+4, …`), the number of
/// components reaching outward; the count must agree on the last two.
pub fn count_ends_from(
    base: EndBase,
    pairs: usize,
    levels: usize,
    r0: i64,
) -> Result<usize, TopologyError> {
    if levels < 2 {
        return Err(TopologyError::TooFewLevels(levels));
    }
    let grid = CellGrid::new(base, pairs)?;
    let counts: Vec<usize> = (1..=levels as i64)
        .map(|j| grid.escaping_components(r0 + 4 * (j - 1), r0 + 4 * j))
        .collect();
    let last = counts[counts.len() - 1];
    if counts[counts.len() - 2] != last {
        return Err(TopologyError::NotStabilized { counts });
    }
    Ok(last)
}

/// Number of ends of the base carrying `pairs` glued slit pairs, measured
/// outside the smallest truncation enclosing every slit.
pub fn count_ends(base: EndBase, pairs: usize, levels: usize) -> Result<usize, TopologyError> {
    count_ends_from(base, pairs, levels, 8 * pairs as i64 + 4)
}
