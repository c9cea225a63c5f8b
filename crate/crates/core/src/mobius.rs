//! Exact Möbius transformations of the upper half-plane.
//!
//! Group elements are integer matrices of determinant one, kept in a
//! canonical sign so that two maps are equal exactly when their four
//! entries are. Points and circles live in floating point on top.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Default absolute tolerance for geometric comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobiusError {
    #[error(
        "matrix [[{}, {}], [{}, {}]] has determinant {det}, expected 1",
        entries[0], entries[1], entries[2], entries[3]
    )]
    Determinant {
        /// `[a, b, c, d]`, boxed to keep the error small.
        entries: Box<[BigInt; 4]>,
        det: BigInt,
    },
    #[error("point {re} + {im}i is not in the upper half-plane")]
    NotInUpperHalfPlane { re: f64, im: f64 },
    #[error("circle radius must be positive and finite, got {0}")]
    BadRadius(f64),
}

/// A point `re + im·i` with `im > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    re: f64,
    im: f64,
}

impl UpperHalfPoint {
    pub fn new(re: f64, im: f64) -> Result<Self, MobiusError> {
        if re.is_finite() && im.is_finite() && im > 0.0 {
            Ok(UpperHalfPoint { re, im })
        } else {
            Err(MobiusError::NotInUpperHalfPlane { re, im })
        }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    /// Euclidean distance to a point of the real axis.
    pub fn dist_to_real(&self, x: f64) -> f64 {
        (self.re - x).hypot(self.im)
    }

    pub fn dist(&self, other: &UpperHalfPoint) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

impl fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

/// A point of the extended real line, the boundary of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RealPoint {
    Finite(f64),
    Infinity,
}

/// A geodesic of the upper half-plane: a half-circle centered on the real
/// axis or a vertical half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneralizedCircle {
    Circle { center: f64, radius: f64 },
    VerticalLine { x0: f64 },
}

/// The two complementary regions cut out by a generalized circle.
///
/// For a vertical line, `Inside` is the half-plane to its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Inside,
    Outside,
}

impl GeneralizedCircle {
    pub fn circle(center: f64, radius: f64) -> Result<Self, MobiusError> {
        if radius.is_finite() && radius > 0.0 && center.is_finite() {
            Ok(GeneralizedCircle::Circle { center, radius })
        } else {
            Err(MobiusError::BadRadius(radius))
        }
    }

    /// The unit half-circle `C_{4n}` centered at `4n`.
    pub fn unit_at(center: i64) -> Self {
        GeneralizedCircle::Circle {
            center: center as f64,
            radius: 1.0,
        }
    }

    /// Endpoints on the extended real line.
    pub fn endpoints(&self) -> (RealPoint, RealPoint) {
        match *self {
            GeneralizedCircle::Circle { center, radius } => (
                RealPoint::Finite(center - radius),
                RealPoint::Finite(center + radius),
            ),
            GeneralizedCircle::VerticalLine { x0 } => (RealPoint::Finite(x0), RealPoint::Infinity),
        }
    }

    /// Signed offset of `z` from the curve: negative inside, positive outside.
    pub fn signed_offset(&self, z: &UpperHalfPoint) -> f64 {
        match *self {
            GeneralizedCircle::Circle { center, radius } => z.dist_to_real(center) - radius,
            GeneralizedCircle::VerticalLine { x0 } => z.re - x0,
        }
    }

    /// Which side of the curve `z` is on, or `None` if it lies on the curve
    /// within `tol`.
    pub fn region(&self, z: &UpperHalfPoint, tol: f64) -> Option<Region> {
        let off = self.signed_offset(z);
        if off < -tol {
            Some(Region::Inside)
        } else if off > tol {
            Some(Region::Outside)
        } else {
            None
        }
    }

    /// Whether `z` lies on the curve within `tol`.
    pub fn passes_through(&self, z: &UpperHalfPoint, tol: f64) -> bool {
        self.signed_offset(z).abs() <= tol
    }

    pub fn approx_eq(&self, other: &GeneralizedCircle, tol: f64) -> bool {
        match (*self, *other) {
            (
                GeneralizedCircle::Circle {
                    center: c1,
                    radius: r1,
                },
                GeneralizedCircle::Circle {
                    center: c2,
                    radius: r2,
                },
            ) => (c1 - c2).abs() <= tol && (r1 - r2).abs() <= tol,
            (
                GeneralizedCircle::VerticalLine { x0: a },
                GeneralizedCircle::VerticalLine { x0: b },
            ) => (a - b).abs() <= tol,
            _ => false,
        }
    }

    /// Point on the curve at parameter `t ∈ (0, 1)`: angle `π·t` along a
    /// circle, height `tan(π·t/2)` along a line.
    pub fn point_at(&self, t: f64) -> UpperHalfPoint {
        let theta = std::f64::consts::PI * t;
        match *self {
            GeneralizedCircle::Circle { center, radius } => UpperHalfPoint {
                re: center + radius * theta.cos(),
                im: radius * theta.sin(),
            },
            GeneralizedCircle::VerticalLine { x0 } => UpperHalfPoint {
                re: x0,
                im: (theta / 2.0).tan(),
            },
        }
    }
}

impl fmt::Display for GeneralizedCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralizedCircle::Circle { center, radius } => {
                write!(f, "circle(center={center}, radius={radius})")
            }
            GeneralizedCircle::VerticalLine { x0 } => write!(f, "line(x={x0})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for MobiusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MobiusKind::Identity => "identity",
            MobiusKind::Elliptic => "elliptic",
            MobiusKind::Parabolic => "parabolic",
            MobiusKind::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

/// Fixed points of a Möbius map acting on the closed upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedPoints {
    /// The identity fixes everything.
    Everything,
    /// Parabolic (one point) or hyperbolic (two points) elements.
    Boundary(Vec<RealPoint>),
    /// The unique fixed point of an elliptic element.
    Interior(UpperHalfPoint),
}

/// `z ↦ (az + b)/(cz + d)` with integer entries and `ad − bc = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MobiusMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl MobiusMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, MobiusError> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(MobiusError::Determinant {
                entries: Box::new([a, b, c, d]),
                det,
            });
        }
        Ok(Self::canonical(a, b, c, d))
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self, MobiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    // Caller guarantees det = 1.
    fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|x| !x.is_zero())
            .map(|x| x.is_negative())
            .unwrap_or(false);
        if lead {
            MobiusMap {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            MobiusMap { a, b, c, d }
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn determinant(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// Matrix product `self · other`, i.e. the map `z ↦ self(other(z))`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let a = &self.a * &other.a + &self.b * &other.c;
        let b = &self.a * &other.b + &self.b * &other.d;
        let c = &self.c * &other.a + &self.d * &other.c;
        let d = &self.c * &other.b + &self.d * &other.d;
        Self::canonical(a, b, c, d)
    }

    pub fn inverse(&self) -> MobiusMap {
        Self::canonical(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
    }

    /// `s · self · s⁻¹`.
    pub fn conjugate_by(&self, s: &MobiusMap) -> MobiusMap {
        s.compose(self).compose(&s.inverse())
    }

    pub fn classify(&self) -> MobiusKind {
        if self.is_identity() {
            return MobiusKind::Identity;
        }
        let tr = self.trace().abs();
        let two = BigInt::from(2);
        match tr.cmp(&two) {
            std::cmp::Ordering::Less => MobiusKind::Elliptic,
            std::cmp::Ordering::Equal => MobiusKind::Parabolic,
            std::cmp::Ordering::Greater => MobiusKind::Hyperbolic,
        }
    }

    fn as_f64(&self) -> [f64; 4] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }

    /// Evaluate at a point of the upper half-plane.
    ///
    /// The imaginary part is computed as `im / |cz + d|²`, which keeps the
    /// image in the upper half-plane whatever the rounding.
    pub fn apply(&self, z: UpperHalfPoint) -> UpperHalfPoint {
        let [a, b, c, d] = self.as_f64();
        // (az + b) conj(cz + d) / |cz + d|²
        let nr = a * z.re + b;
        let ni = a * z.im;
        let dr = c * z.re + d;
        let di = c * z.im;
        let den = dr * dr + di * di;
        UpperHalfPoint {
            re: (nr * dr + ni * di) / den,
            im: z.im / den,
        }
    }

    /// Action on the extended real line. A finite point within `tol` of the
    /// pole `−d/c` is sent to infinity.
    pub fn apply_real(&self, x: RealPoint, tol: f64) -> RealPoint {
        let [a, b, c, d] = self.as_f64();
        match x {
            RealPoint::Infinity => {
                if self.c.is_zero() {
                    RealPoint::Infinity
                } else {
                    RealPoint::Finite(a / c)
                }
            }
            RealPoint::Finite(x) => {
                if !self.c.is_zero() && (x + d / c).abs() <= tol {
                    return RealPoint::Infinity;
                }
                RealPoint::Finite((a * x + b) / (c * x + d))
            }
        }
    }

    /// Image of a geodesic. The image is determined by where its two ideal
    /// endpoints go.
    pub fn image_of_circle(&self, circle: &GeneralizedCircle, tol: f64) -> GeneralizedCircle {
        let (p, q) = circle.endpoints();
        match (self.apply_real(p, tol), self.apply_real(q, tol)) {
            (RealPoint::Finite(u), RealPoint::Finite(v)) => GeneralizedCircle::Circle {
                center: 0.5 * (u + v),
                radius: 0.5 * (u - v).abs(),
            },
            (RealPoint::Finite(x0), RealPoint::Infinity)
            | (RealPoint::Infinity, RealPoint::Finite(x0)) => {
                GeneralizedCircle::VerticalLine { x0 }
            }
            // endpoints are distinct and the map is a bijection
            (RealPoint::Infinity, RealPoint::Infinity) => unreachable!("two endpoints sent to ∞"),
        }
    }

    /// Solutions of `c·w² + (d − a)·w − b = 0` in the closed upper half-plane.
    pub fn fixed_points(&self) -> FixedPoints {
        if self.is_identity() {
            return FixedPoints::Everything;
        }
        let [a, b, c, d] = self.as_f64();
        // discriminant (d − a)² + 4bc = tr² − 4, exact in integers
        let tr = self.trace();
        let disc_exact = &tr * &tr - BigInt::from(4);
        let disc = disc_exact.to_f64().unwrap_or(f64::INFINITY);
        if self.c.is_zero() {
            // fixes ∞; the other fixed point is b / (d − a) unless parabolic
            let mut pts = vec![RealPoint::Infinity];
            if self.a != self.d {
                pts.push(RealPoint::Finite(b / (d - a)));
            }
            return FixedPoints::Boundary(pts);
        }
        if disc_exact.is_negative() {
            return FixedPoints::Interior(UpperHalfPoint {
                re: (a - d) / (2.0 * c),
                im: (-disc).sqrt() / (2.0 * c.abs()),
            });
        }
        if disc_exact.is_zero() {
            return FixedPoints::Boundary(vec![RealPoint::Finite((a - d) / (2.0 * c))]);
        }
        let s = disc.sqrt();
        let mut roots = [(a - d - s) / (2.0 * c), (a - d + s) / (2.0 * c)];
        roots.sort_by(f64::total_cmp);
        FixedPoints::Boundary(roots.into_iter().map(RealPoint::Finite).collect())
    }
}

impl Mul for &MobiusMap {
    type Output = MobiusMap;

    fn mul(self, rhs: &MobiusMap) -> MobiusMap {
        self.compose(rhs)
    }
}

impl fmt::Debug for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MobiusMap{self}")
    }
}

impl fmt::Display for MobiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

// Entries go out as decimal strings so arbitrarily large values survive JSON.
impl Serialize for MobiusMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows = [
            [self.a.to_string(), self.b.to_string()],
            [self.c.to_string(), self.d.to_string()],
        ];
        rows.serialize(serializer)
    }
}
