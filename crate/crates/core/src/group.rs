//! The infinitely generated Fuchsian group pairing the half-circles
//! `C_{4n} = {|z − 4n| = 1}`.
//!
//! For every integer `m`, `f_m` carries `C_{16m}` onto `C_{16m+8}` and `g_m`
//! carries `C_{16m+4}` onto `C_{16m+12}`. The common exterior `P` of all the
//! circles is a fundamental domain. The generating set is infinite, so every
//! operation here takes an explicit window `|m| ≤ window`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mobius::{
    FixedPoints, GeneralizedCircle, MobiusKind, MobiusMap, RealPoint, Region, UpperHalfPoint,
};

/// Default iteration cap for [`reduce_to_domain`].
pub const DEFAULT_REDUCTION_CAP: usize = 10_000;
/// Default cap on the number of enumerated words.
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("point {point} lies inside C_{center}, whose generator needs |m| = {needed} > window {window}")]
    WindowExceeded {
        point: UpperHalfPoint,
        center: i64,
        needed: i64,
        window: i64,
    },
    #[error("reduction did not reach the fundamental domain within {cap} steps")]
    NonTermination { cap: usize },
    #[error("enumeration would produce {requested} words, above the cap of {cap}")]
    ResourceLimit { requested: u128, cap: usize },
    #[error("window must be non-negative, got {0}")]
    NegativeWindow(i64),
}

/// Which reading of the `g_m` formula to use.
///
/// `Printed` takes the leading coefficient `16m + 8`, which sends `C_{16m+4}`
/// onto `C_{16m+8}` and collides with the target of `f_m`. `Corrected` uses
/// `16m + 12`, which realizes the pairing `C_{16m+4} ↔ C_{16m+12}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GVariant {
    Printed,
    #[default]
    Corrected,
}

impl fmt::Display for GVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GVariant::Printed => "printed",
            GVariant::Corrected => "corrected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    F,
    G,
}

/// One generator or inverse generator.
///
/// Ordering is by family, then `m`, then plain before inverted; this is the
/// alphabet order used by [`enumerate_words`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorLetter {
    pub family: Family,
    pub m: i64,
    pub inverted: bool,
}

impl GeneratorLetter {
    pub fn f(m: i64) -> Self {
        GeneratorLetter {
            family: Family::F,
            m,
            inverted: false,
        }
    }

    pub fn g(m: i64) -> Self {
        GeneratorLetter {
            family: Family::G,
            m,
            inverted: false,
        }
    }

    pub fn inverse(self) -> Self {
        GeneratorLetter {
            inverted: !self.inverted,
            ..self
        }
    }

    pub fn matrix(&self, variant: GVariant) -> MobiusMap {
        let t = match self.family {
            Family::F => gen_f(self.m),
            Family::G => gen_g(self.m, variant),
        };
        if self.inverted {
            t.inverse()
        } else {
            t
        }
    }

    /// Centers of the circle whose inside this letter sends outside, and of
    /// the circle receiving it.
    pub fn source_and_target(&self) -> (i64, i64) {
        let base = 16 * self.m
            + match self.family {
                Family::F => 0,
                Family::G => 4,
            };
        if self.inverted {
            (base + 8, base)
        } else {
            (base, base + 8)
        }
    }
}

impl fmt::Display for GeneratorLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::F => "f",
            Family::G => "g",
        };
        write!(f, "{name}{}", self.m)?;
        if self.inverted {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// A freely reduced word in the generators.
///
/// The word `[l₁, l₂, …, lₖ]` denotes the map `z ↦ l₁(l₂(…lₖ(z)))`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<GeneratorLetter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, cancelling adjacent inverse pairs.
    pub fn from_letters(letters: impl IntoIterator<Item = GeneratorLetter>) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push_back(l);
        }
        w
    }

    pub fn letters(&self) -> &[GeneratorLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[1] != p[0].inverse())
    }

    /// Right-multiply by a letter.
    pub fn push_back(&mut self, l: GeneratorLetter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    /// Left-multiply by a letter.
    pub fn push_front(&mut self, l: GeneratorLetter) {
        if self.0.first() == Some(&l.inverse()) {
            self.0.remove(0);
        } else {
            self.0.insert(0, l);
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn matrix(&self, variant: GVariant) -> MobiusMap {
        self.0.iter().fold(MobiusMap::identity(), |acc, l| {
            acc.compose(&l.matrix(variant))
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("id");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `f_m(z) = ((16m+8)z − (1 + 16m(16m+8))) / (z − 16m)`.
pub fn gen_f(m: i64) -> MobiusMap {
    let p = BigInt::from(16) * BigInt::from(m);
    let a: BigInt = &p + BigInt::from(8);
    let b: BigInt = -(BigInt::from(1) + &p * &a);
    MobiusMap::new(a, b, BigInt::from(1), -p).expect("f_m has determinant 1")
}

/// `g_m(z) = (k·z − (1 + (16m+4)k)) / (z − (16m+4))` with `k = 16m+8`
/// (printed) or `k = 16m+12` (corrected).
pub fn gen_g(m: i64, variant: GVariant) -> MobiusMap {
    let q: BigInt = BigInt::from(16) * BigInt::from(m) + BigInt::from(4);
    let k: BigInt = match variant {
        GVariant::Printed => &q + BigInt::from(4),
        GVariant::Corrected => &q + BigInt::from(8),
    };
    let b: BigInt = -(BigInt::from(1) + &q * &k);
    MobiusMap::new(k, b, BigInt::from(1), -q).expect("g_m has determinant 1")
}

/// All generators and inverses with `|m| ≤ window`, in alphabet order.
pub fn alphabet(window: i64) -> Vec<GeneratorLetter> {
    let mut out = Vec::new();
    for family in [Family::F, Family::G] {
        for m in -window..=window {
            for inverted in [false, true] {
                out.push(GeneratorLetter {
                    family,
                    m,
                    inverted,
                });
            }
        }
    }
    out
}

/// Index `n` of the nearest circle `C_{4n}` to a real abscissa.
fn nearest_index(re: f64) -> i64 {
    (re / 4.0).round() as i64
}

/// Membership in the closed fundamental domain `|z − 4n| ≥ 1` for all `n`.
pub fn domain_contains(z: &UpperHalfPoint, tol: f64) -> bool {
    // circles are 4 apart with radius 1, so only the nearest center matters
    let n = nearest_index(z.re());
    z.dist_to_real(4.0 * n as f64) >= 1.0 - tol
}

/// The circle whose open inside contains `z` (beyond `tol`), if any.
pub fn enclosing_circle(z: &UpperHalfPoint, tol: f64) -> Option<i64> {
    let c = 4 * nearest_index(z.re());
    (z.dist_to_real(c as f64) < 1.0 - tol).then_some(c)
}

/// The letter that sends the inside of `C_center` to the outside of its partner.
pub fn letter_for_circle(center: i64) -> GeneratorLetter {
    debug_assert!(center.rem_euclid(4) == 0);
    let n = center.div_euclid(4);
    let m = n.div_euclid(4);
    match n.rem_euclid(4) {
        0 => GeneratorLetter::f(m),
        1 => GeneratorLetter::g(m),
        2 => GeneratorLetter::f(m).inverse(),
        _ => GeneratorLetter::g(m).inverse(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// `point == word(original)`.
    pub word: Word,
    pub point: UpperHalfPoint,
    pub steps: usize,
}

/// Moves `z` into the fundamental domain by repeatedly applying the pairing
/// generator of whichever circle it is inside. Uses the corrected `g_m`.
pub fn reduce_to_domain(
    z: UpperHalfPoint,
    window: i64,
    tol: f64,
    cap: usize,
) -> Result<Reduction, GroupError> {
    if window < 0 {
        return Err(GroupError::NegativeWindow(window));
    }
    let mut word = Word::identity();
    let mut point = z;
    let mut steps = 0;
    while let Some(center) = enclosing_circle(&point, tol) {
        if steps == cap {
            return Err(GroupError::NonTermination { cap });
        }
        let letter = letter_for_circle(center);
        if letter.m.abs() > window {
            return Err(GroupError::WindowExceeded {
                point,
                center,
                needed: letter.m.abs(),
                window,
            });
        }
        point = letter.matrix(GVariant::Corrected).apply(point);
        word.push_front(letter);
        steps += 1;
    }
    Ok(Reduction { word, point, steps })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingRecord {
    pub letter: GeneratorLetter,
    pub source: GeneralizedCircle,
    pub claimed_target: GeneralizedCircle,
    pub computed_image: GeneralizedCircle,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingReport {
    pub window: i64,
    pub variant: GVariant,
    pub tolerance: f64,
    pub records: Vec<PairingRecord>,
}

impl PairingReport {
    pub fn matched(&self) -> usize {
        self.records.iter().filter(|r| r.matches).count()
    }

    pub fn all_match(&self) -> bool {
        self.records.iter().all(|r| r.matches)
    }
}

/// Checks that `f_m` maps `C_{16m}` onto `C_{16m+8}` and `g_m` maps
/// `C_{16m+4}` onto `C_{16m+12}` for every `|m| ≤ window`.
pub fn verify_side_pairings(window: i64, variant: GVariant, tol: f64) -> PairingReport {
    let mut records = Vec::new();
    for m in -window..=window {
        for letter in [GeneratorLetter::f(m), GeneratorLetter::g(m)] {
            let (src, dst) = letter.source_and_target();
            let source = GeneralizedCircle::unit_at(src);
            let claimed_target = GeneralizedCircle::unit_at(dst);
            let computed_image = letter.matrix(variant).image_of_circle(&source, tol);
            records.push(PairingRecord {
                letter,
                source,
                claimed_target,
                computed_image,
                matches: computed_image.approx_eq(&claimed_target, tol),
            });
        }
    }
    PairingReport {
        window,
        variant,
        tolerance: tol,
        records,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangeViolation {
    pub letter: GeneratorLetter,
    pub sample: UpperHalfPoint,
    pub image: UpperHalfPoint,
    pub sample_region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeReport {
    pub window: i64,
    pub samples_per_side: usize,
    pub checked: usize,
    pub violations: Vec<ExchangeViolation>,
}

impl ExchangeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Deterministic low-discrepancy samples strictly inside `C_center`.
pub fn inside_samples(center: i64, count: usize) -> Vec<UpperHalfPoint> {
    (0..count)
        .map(|j| {
            let u = (j as f64 + 0.5) / count as f64;
            let v = (j as f64 * GOLDEN).fract();
            let r = 0.02 + 0.96 * u;
            let theta = std::f64::consts::PI * (0.01 + 0.98 * v);
            UpperHalfPoint::new(center as f64 + r * theta.cos(), r * theta.sin())
                .expect("sample in upper half-plane")
        })
        .collect()
}

/// Deterministic samples outside `C_center` and inside the fundamental
/// domain: a band around the circle plus a few far-away points.
pub fn outside_samples(center: i64, count: usize) -> Vec<UpperHalfPoint> {
    (0..count)
        .map(|j| {
            let u = (j as f64 + 0.5) / count as f64;
            let v = (j as f64 * GOLDEN).fract();
            let theta = std::f64::consts::PI * (0.01 + 0.98 * v);
            // radius in (1, 2.9) for most points, far field for every eighth
            let r = if j % 8 == 7 {
                3.0 + 40.0 * u
            } else {
                1.02 + 1.88 * u
            };
            let z = if r < 3.0 {
                UpperHalfPoint::new(center as f64 + r * theta.cos(), r * theta.sin())
            } else {
                UpperHalfPoint::new(center as f64 + r * theta.cos(), 1.5 + r * theta.sin())
            };
            z.expect("sample in upper half-plane")
        })
        .collect()
}

/// Samples both sides of each source circle and checks that every
/// generator with `|m| ≤ window` swaps inside and outside: the inside of the
/// source lands outside the target, the outside lands inside. Uses the
/// corrected `g_m`.
pub fn region_exchange_report(window: i64, samples_per_side: usize, tol: f64) -> ExchangeReport {
    let mut checked = 0;
    let mut violations = Vec::new();
    for m in -window..=window {
        for letter in [GeneratorLetter::f(m), GeneratorLetter::g(m)] {
            let (src, dst) = letter.source_and_target();
            let t = letter.matrix(GVariant::Corrected);
            let target = GeneralizedCircle::unit_at(dst);
            let sides = [
                (Region::Inside, inside_samples(src, samples_per_side)),
                (Region::Outside, outside_samples(src, samples_per_side)),
            ];
            for (sample_region, samples) in sides {
                let want = match sample_region {
                    Region::Inside => Region::Outside,
                    Region::Outside => Region::Inside,
                };
                for z in samples {
                    if sample_region == Region::Outside {
                        debug_assert!(domain_contains(&z, tol));
                    }
                    let w = t.apply(z);
                    checked += 1;
                    if target.region(&w, tol) != Some(want) {
                        violations.push(ExchangeViolation {
                            letter,
                            sample: z,
                            image: w,
                            sample_region,
                        });
                    }
                }
            }
        }
    }
    ExchangeReport {
        window,
        samples_per_side,
        checked,
        violations,
    }
}

/// Sampled check that the generators exchange insides and outsides.
pub fn verify_region_exchange(window: i64) -> bool {
    region_exchange_report(window, 64, crate::mobius::DEFAULT_TOL).passed()
}

/// Number of reduced words of length exactly `len` over an alphabet of
/// `letters` symbols closed under inversion.
pub fn reduced_word_count(letters: u128, len: u32) -> u128 {
    match len {
        0 => 1,
        _ => letters * (letters - 1).pow(len - 1),
    }
}

#[derive(Debug, Clone)]
pub struct WordElement {
    pub word: Word,
    pub matrix: MobiusMap,
}

/// Breadth-first enumeration of all reduced words of length ≤ `depth` over
/// the letters with `|m| ≤ window`, in shortlex order, each with its matrix.
pub fn enumerate_words(
    window: i64,
    depth: u32,
    variant: GVariant,
    cap: usize,
) -> Result<Vec<WordElement>, GroupError> {
    if window < 0 {
        return Err(GroupError::NegativeWindow(window));
    }
    let letters = alphabet(window);
    let n = letters.len() as u128;
    let requested = (0..=depth)
        .try_fold(0u128, |acc, d| {
            n.checked_pow(d)
                .map(|_| acc.saturating_add(reduced_word_count(n, d)))
        })
        .unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(GroupError::ResourceLimit { requested, cap });
    }
    let mats: Vec<MobiusMap> = letters.iter().map(|l| l.matrix(variant)).collect();

    let mut out = Vec::with_capacity(requested as usize);
    out.push(WordElement {
        word: Word::identity(),
        matrix: MobiusMap::identity(),
    });
    let mut level_start = 0;
    for _ in 0..depth {
        let level_end = out.len();
        // order-preserving parallel extension of the previous level
        let next: Vec<WordElement> = out[level_start..level_end]
            .par_iter()
            .flat_map_iter(|prev| {
                let last = prev.word.letters().last().copied();
                letters
                    .iter()
                    .zip(&mats)
                    .filter(move |(l, _)| Some(l.inverse()) != last)
                    .map(move |(l, t)| {
                        let mut word = prev.word.clone();
                        word.0.push(*l);
                        WordElement {
                            word,
                            matrix: prev.matrix.compose(t),
                        }
                    })
            })
            .collect();
        level_start = level_end;
        out.extend(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeOffender {
    pub word: Word,
    pub matrix: MobiusMap,
    pub kind: MobiusKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointProbe {
    pub window: i64,
    pub depth: u32,
    /// Non-identity words examined.
    pub elements: usize,
    pub hyperbolic: usize,
    pub parabolic: usize,
    /// Words whose matrix is elliptic or the identity.
    pub offenders: Vec<ProbeOffender>,
    /// Distinct matrices among all enumerated words, identity included.
    pub distinct_matrices: usize,
    pub total_words: usize,
    /// Every non-identity element has only boundary fixed points.
    pub all_fixed_points_real: bool,
}

impl FixedPointProbe {
    pub fn words_distinct(&self) -> bool {
        self.distinct_matrices == self.total_words
    }

    pub fn interior_fixed_points_found(&self) -> bool {
        !self.offenders.is_empty() || !self.all_fixed_points_real
    }
}

/// Classifies every non-identity reduced word up to `depth` and checks that
/// all of them are distinct and have no fixed point inside the half-plane.
pub fn probe_fixed_points(
    window: i64,
    depth: u32,
    variant: GVariant,
    cap: usize,
) -> Result<FixedPointProbe, GroupError> {
    let words = enumerate_words(window, depth, variant, cap)?;
    let distinct_matrices = words
        .iter()
        .map(|w| &w.matrix)
        .collect::<HashSet<_>>()
        .len();

    let classified: Vec<(MobiusKind, bool)> = words[1..]
        .par_iter()
        .map(|w| {
            let kind = w.matrix.classify();
            let real = matches!(w.matrix.fixed_points(), FixedPoints::Boundary(ref pts)
                if pts.iter().all(|p| matches!(p, RealPoint::Finite(x) if x.is_finite())
                    || *p == RealPoint::Infinity));
            (kind, real)
        })
        .collect();

    let mut hyperbolic = 0;
    let mut parabolic = 0;
    let mut all_fixed_points_real = true;
    let mut offenders = Vec::new();
    for (w, (kind, real)) in words[1..].iter().zip(classified) {
        all_fixed_points_real &= real;
        match kind {
            MobiusKind::Hyperbolic => hyperbolic += 1,
            MobiusKind::Parabolic => parabolic += 1,
            MobiusKind::Elliptic | MobiusKind::Identity => offenders.push(ProbeOffender {
                word: w.word.clone(),
                matrix: w.matrix.clone(),
                kind,
            }),
        }
    }
    Ok(FixedPointProbe {
        window,
        depth,
        elements: words.len() - 1,
        hyperbolic,
        parabolic,
        offenders,
        distinct_matrices,
        total_words: words.len(),
        all_fixed_points_real,
    })
}
