//! Discrete proper metric spaces presented by exact ball enumerators.
//!
//! Every built-in space enumerates the ball around *any* of its points, not only
//! around the basepoint. Windows are balls around a chosen basepoint; computations
//! restricted to a window carry an exactness flag saying whether the window was
//! large enough to certify the answer.

use crate::error::{Error, Result};
use crate::rational::{abs_diff, floor_i64, format_q, q, serde_q};
use crate::{par, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Largest exponent of a `GeomLine` point. Keeps sums of a few distances inside `i64`.
pub const GEOM_MAX_EXP: u32 = 56;
/// Coordinate bound for the unbounded lines and `TwoTails`.
pub const COORD_LIMIT: i64 = 1 << 40;
/// Default radius cap for certified distance searches.
pub const DEFAULT_SEARCH_CAP: i64 = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId {
    dim: u8,
    c: [i64; 2],
}

impl PointId {
    pub const fn p1(x: i64) -> Self {
        PointId { dim: 1, c: [x, 0] }
    }

    pub const fn p2(x: i64, y: i64) -> Self {
        PointId { dim: 2, c: [x, y] }
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.dim as usize]
    }

    pub fn x(&self) -> i64 {
        self.c[0]
    }

    pub fn y(&self) -> i64 {
        self.c[1]
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn from_coords(c: &[i64]) -> Result<Self> {
        match c {
            [x] => Ok(Self::p1(*x)),
            [x, y] => Ok(Self::p2(*x, *y)),
            _ => Err(Error::Parse(format!("point must have 1 or 2 coordinates, got {c:?}"))),
        }
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            1 => write!(f, "{}", self.c[0]),
            _ => write!(f, "({},{})", self.c[0], self.c[1]),
        }
    }
}

impl Serialize for PointId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        PointId::from_coords(&v).map_err(serde::de::Error::custom)
    }
}

/// The tail-height function of `TwoTails`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phi {
    /// `1 + ν₂(n)`, the ruler function.
    Ruler,
    /// `1 + ((n - 1) mod k)`.
    Cyclic(u32),
}

impl Phi {
    pub fn eval(&self, n: i64) -> i64 {
        debug_assert!(n >= 1);
        match self {
            Phi::Ruler => 1 + n.trailing_zeros() as i64,
            Phi::Cyclic(k) => 1 + (n - 1) % (*k).max(1) as i64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CustomMetric {
    Manhattan,
    EuclideanRounded,
    /// Row-major distances indexed like the sorted point list.
    Table(Vec<Vec<Q>>),
}

/// A finite space loaded from JSON.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSpace {
    pub name: String,
    points: Vec<PointId>,
    metric: CustomMetric,
    /// When set, the list is a truncation of a larger space and only balls inside
    /// `B(points[0], complete_within)` are certified complete.
    pub complete_within: Option<Q>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CustomSpaceJson {
    #[serde(default)]
    name: Option<String>,
    points: Vec<Vec<i64>>,
    metric: String,
    #[serde(default)]
    table: Option<Vec<Vec<crate::rational::ExactQ>>>,
    #[serde(default, with = "opt_q")]
    complete_within: Option<Q>,
}

mod opt_q {
    use super::*;
    pub fn serialize<S: serde::Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => serde_q::serialize(v, s),
            None => s.serialize_none(),
        }
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        Option::<crate::rational::ExactQ>::deserialize(d).map(|v| v.map(|e| e.0))
    }
}

impl CustomSpace {
    pub fn new(
        name: impl Into<String>,
        points: Vec<PointId>,
        metric: CustomMetric,
        complete_within: Option<Q>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("custom space needs at least one point"));
        }
        // Keep the caller's order for table lookup, then sort both together.
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by_key(|&i| points[i]);
        let sorted: Vec<PointId> = idx.iter().map(|&i| points[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("custom space has duplicate points"));
        }
        let metric = match metric {
            CustomMetric::Table(t) => {
                let n = points.len();
                if t.len() != n || t.iter().any(|r| r.len() != n) {
                    return Err(Error::domain("distance table must be square and match the point list"));
                }
                CustomMetric::Table(idx.iter().map(|&i| idx.iter().map(|&j| t[i][j]).collect()).collect())
            }
            m => m,
        };
        let space = CustomSpace {
            name: name.into(),
            points: sorted,
            metric,
            complete_within,
        };
        space.validate()?;
        Ok(space)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CustomSpaceJson = serde_json::from_str(text)?;
        let points = raw
            .points
            .iter()
            .map(|c| PointId::from_coords(c))
            .collect::<Result<Vec<_>>>()?;
        let metric = match raw.metric.as_str() {
            "manhattan" => CustomMetric::Manhattan,
            "euclidean-rounded" => CustomMetric::EuclideanRounded,
            "table" => CustomMetric::Table(
                raw.table
                    .ok_or_else(|| Error::Parse("metric \"table\" needs a \"table\" field".into()))?
                    .into_iter()
                    .map(|r| r.into_iter().map(|e| e.0).collect())
                    .collect(),
            ),
            other => return Err(Error::Parse(format!("unknown metric {other:?}"))),
        };
        Self::new(raw.name.unwrap_or_else(|| "custom".into()), points, metric, raw.complete_within)
    }

    pub fn to_json(&self) -> String {
        let (metric, table) = match &self.metric {
            CustomMetric::Manhattan => ("manhattan", None),
            CustomMetric::EuclideanRounded => ("euclidean-rounded", None),
            CustomMetric::Table(t) => (
                "table",
                Some(t.iter().map(|r| r.iter().map(|v| (*v).into()).collect()).collect()),
            ),
        };
        let raw = CustomSpaceJson {
            name: Some(self.name.clone()),
            points: self.points.iter().map(|p| p.coords().to_vec()).collect(),
            metric: metric.into(),
            table,
            complete_within: self.complete_within,
        };
        serde_json::to_string(&raw).expect("custom space serializes")
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    fn index(&self, p: &PointId) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    fn raw_dist(&self, i: usize, j: usize) -> Q {
        let (a, b) = (&self.points[i], &self.points[j]);
        match &self.metric {
            CustomMetric::Table(t) => t[i][j],
            CustomMetric::Manhattan => {
                q(a.coords().iter().zip(b.coords()).map(|(u, v)| (u - v).abs()).sum())
            }
            CustomMetric::EuclideanRounded => {
                let s: i64 = a.coords().iter().zip(b.coords()).map(|(u, v)| (u - v) * (u - v)).sum();
                // round(sqrt(s)) = r with (r - 1/2)^2 <= s < (r + 1/2)^2, i.e. 4r^2 - 4r + 1 <= 4s
                let mut r = (s as f64).sqrt().round() as i64;
                while r > 0 && 4 * r * r - 4 * r + 1 > 4 * s {
                    r -= 1;
                }
                while 4 * r * r + 4 * r + 1 <= 4 * s {
                    r += 1;
                }
                q(r)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if self.points.iter().any(|p| p.dim() != self.points[0].dim()) {
            return Err(Error::domain("custom points must share a dimension"));
        }
        for i in 0..n {
            if !self.raw_dist(i, i).is_zero() {
                return Err(Error::domain(format!("d(p,p) != 0 at {}", self.points[i])));
            }
            for j in 0..n {
                let dij = self.raw_dist(i, j);
                if i != j && !dij.is_positive() {
                    return Err(Error::domain(format!(
                        "non-positive distance between {} and {}",
                        self.points[i], self.points[j]
                    )));
                }
                if dij != self.raw_dist(j, i) {
                    return Err(Error::domain(format!(
                        "asymmetric distance between {} and {}",
                        self.points[i], self.points[j]
                    )));
                }
                for k in 0..n {
                    if dij > self.raw_dist(i, k) + self.raw_dist(k, j) {
                        return Err(Error::domain(format!(
                            "triangle inequality fails at ({}, {}, {})",
                            self.points[i], self.points[k], self.points[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// An exact presentation of a discrete proper metric space.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpace {
    /// `{0, 1, 2, ...}` with `|x - y|`.
    NatLine,
    /// `ℤ` with `|x - y|`.
    IntLine,
    /// `{2^n : n >= 1}` with `|x - y|`.
    GeomLine,
    /// `{(n², ±φ(n)) : n >= 1}` with the Manhattan metric.
    TwoTails(Phi),
    Custom(Arc<CustomSpace>),
}

impl MetricSpace {
    pub fn name(&self) -> String {
        match self {
            MetricSpace::NatLine => "nat-line".into(),
            MetricSpace::IntLine => "int-line".into(),
            MetricSpace::GeomLine => "geom-line".into(),
            MetricSpace::TwoTails(Phi::Ruler) => "two-tails".into(),
            MetricSpace::TwoTails(Phi::Cyclic(k)) => format!("two-tails:cyclic{k}"),
            MetricSpace::Custom(c) => format!("custom:{}", c.name),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "nat-line" | "nat" | "NatLine" => Ok(MetricSpace::NatLine),
            "int-line" | "int" | "IntLine" => Ok(MetricSpace::IntLine),
            "geom-line" | "geom" | "GeomLine" => Ok(MetricSpace::GeomLine),
            "two-tails" | "TwoTails" => Ok(MetricSpace::TwoTails(Phi::Ruler)),
            other => {
                if let Some(k) = other.strip_prefix("two-tails:cyclic") {
                    let k: u32 = k.parse().map_err(|_| Error::Parse(format!("bad cycle length in {other:?}")))?;
                    if k == 0 {
                        return Err(Error::Parse("cycle length must be positive".into()));
                    }
                    return Ok(MetricSpace::TwoTails(Phi::Cyclic(k)));
                }
                Err(Error::Parse(format!("unknown space {other:?}")))
            }
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["nat-line", "int-line", "geom-line", "two-tails"]
    }

    pub fn basepoint(&self) -> PointId {
        match self {
            MetricSpace::NatLine | MetricSpace::IntLine => PointId::p1(0),
            MetricSpace::GeomLine => PointId::p1(2),
            MetricSpace::TwoTails(_) => PointId::p2(1, 1),
            MetricSpace::Custom(c) => c.points[0],
        }
    }

    pub fn contains(&self, p: &PointId) -> bool {
        match self {
            MetricSpace::NatLine => p.dim() == 1 && p.x() >= 0,
            MetricSpace::IntLine => p.dim() == 1,
            MetricSpace::GeomLine => {
                p.dim() == 1 && p.x() >= 2 && (p.x() as u64).is_power_of_two() && p.x().trailing_zeros() <= GEOM_MAX_EXP
            }
            MetricSpace::TwoTails(phi) => {
                if p.dim() != 2 || p.x() < 1 {
                    return false;
                }
                let n = isqrt(p.x());
                n * n == p.x() && p.y().abs() == phi.eval(n)
            }
            MetricSpace::Custom(c) => c.index(p).is_some(),
        }
    }

    fn check(&self, p: &PointId) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(format!("{p} is not a point of {}", self.name())))
        }
    }

    /// Exact distance between two points known to belong to the space.
    pub(crate) fn dist(&self, a: &PointId, b: &PointId) -> Q {
        match self {
            MetricSpace::NatLine | MetricSpace::IntLine | MetricSpace::GeomLine => abs_diff(a.x(), b.x()),
            MetricSpace::TwoTails(_) => q((a.x() - b.x()).abs() + (a.y() - b.y()).abs()),
            MetricSpace::Custom(c) => {
                let (i, j) = (c.index(a).expect("point in space"), c.index(b).expect("point in space"));
                c.raw_dist(i, j)
            }
        }
    }

    /// Distance with membership checks.
    pub fn distance(&self, a: &PointId, b: &PointId) -> Result<Q> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist(a, b))
    }

    /// Smallest positive distance between distinct points (a lower bound for custom spaces).
    pub fn min_gap(&self) -> Q {
        match self {
            MetricSpace::NatLine | MetricSpace::IntLine => q(1),
            MetricSpace::GeomLine | MetricSpace::TwoTails(_) => q(2),
            MetricSpace::Custom(c) => {
                let n = c.points.len();
                let mut best: Option<Q> = None;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let d = c.raw_dist(i, j);
                        best = Some(best.map_or(d, |b| b.min(d)));
                    }
                }
                best.unwrap_or(q(1))
            }
        }
    }

    /// All points at distance `<= radius` from `center`, lexicographically ordered.
    pub fn ball(&self, center: &PointId, radius: &Q) -> Result<Vec<PointId>> {
        if radius.is_negative() {
            return Err(Error::domain("negative radius"));
        }
        self.check(center)?;
        let r = floor_i64(radius);
        let incomplete = || Error::IncompleteEnumeration {
            space: self.name(),
            radius: *radius,
        };
        match self {
            MetricSpace::NatLine | MetricSpace::IntLine => {
                if center.x().abs() + r > COORD_LIMIT {
                    return Err(incomplete());
                }
                let lo = if matches!(self, MetricSpace::NatLine) {
                    (center.x() - r).max(0)
                } else {
                    center.x() - r
                };
                Ok((lo..=center.x() + r).map(PointId::p1).collect())
            }
            MetricSpace::GeomLine => {
                let (lo, hi) = (center.x() - r, center.x() + r);
                if hi >= 1i64 << GEOM_MAX_EXP + 1 {
                    return Err(incomplete());
                }
                Ok((1..=GEOM_MAX_EXP)
                    .map(|e| 1i64 << e)
                    .filter(|&v| v >= lo && v <= hi)
                    .map(PointId::p1)
                    .collect())
            }
            MetricSpace::TwoTails(phi) => {
                if center.x() + r > COORD_LIMIT {
                    return Err(incomplete());
                }
                let lo = (center.x() - r).max(1);
                let mut n = isqrt(lo);
                if n * n < lo {
                    n += 1;
                }
                let mut out = Vec::new();
                while n * n <= center.x() + r {
                    let h = phi.eval(n);
                    for y in [-h, h] {
                        let p = PointId::p2(n * n, y);
                        if (p.x() - center.x()).abs() + (p.y() - center.y()).abs() <= r {
                            out.push(p);
                        }
                    }
                    n += 1;
                }
                Ok(out)
            }
            MetricSpace::Custom(c) => {
                if let Some(cw) = c.complete_within {
                    if self.dist(center, &c.points[0]) + radius > cw {
                        return Err(incomplete());
                    }
                }
                Ok(c.points.iter().copied().filter(|p| self.dist(center, p) <= *radius).collect())
            }
        }
    }
}

fn isqrt(v: i64) -> i64 {
    if v <= 0 {
        return 0;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// A finite truncation of the space: the closed ball of `radius` around `basepoint`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    #[serde(with = "serde_q")]
    pub radius: Q,
    pub basepoint: PointId,
}

impl Window {
    pub fn new(radius: Q, basepoint: PointId) -> Self {
        Window { radius, basepoint }
    }

    /// Window of integer radius around the space's basepoint.
    pub fn around(space: &MetricSpace, radius: i64) -> Self {
        Window::new(q(radius), space.basepoint())
    }

    pub fn with_radius(&self, radius: Q) -> Self {
        Window::new(radius, self.basepoint)
    }

    pub fn contains(&self, space: &MetricSpace, p: &PointId) -> bool {
        space.contains(p) && space.dist(&self.basepoint, p) <= self.radius
    }

    /// Whether the ball `B(center, r)` lies inside the window (certified by the triangle inequality).
    pub fn covers_ball(&self, space: &MetricSpace, center: &PointId, r: &Q) -> bool {
        space.dist(&self.basepoint, center) + r <= self.radius
    }
}

/// `window_points`: the points of the window, lexicographically ordered.
pub fn window_points(space: &MetricSpace, w: &Window) -> Result<Vec<PointId>> {
    if w.radius.is_negative() {
        return Err(Error::domain("window radius must be nonnegative"));
    }
    space.ball(&w.basepoint, &w.radius)
}

pub fn base_distance(space: &MetricSpace, x: &PointId, y: &PointId) -> Result<Q> {
    space.distance(x, y)
}

/// A value together with whether the window certified it.
#[derive(Debug, Clone, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    pub exact: bool,
    /// Radius around the window basepoint that would certify the value; `None` when
    /// no finite radius suffices.
    pub required_radius: Option<Q>,
}

impl<T> Certified<T> {
    pub fn exact(value: T) -> Self {
        Certified {
            value,
            exact: true,
            required_radius: None,
        }
    }

    /// The value if exact, otherwise an `Inconclusive` error.
    pub fn require(self, what: &str) -> Result<T> {
        if self.exact {
            Ok(self.value)
        } else {
            Err(Error::inconclusive(what.to_string(), self.required_radius))
        }
    }
}

type Membership = dyn Fn(&PointId) -> Result<bool> + Send + Sync;

#[derive(Clone)]
enum SetRepr {
    Explicit(Arc<BTreeSet<PointId>>),
    Predicate(Arc<Membership>),
    Complement(Box<PointSet>),
    Union(Box<PointSet>, Box<PointSet>),
    Intersection(Box<PointSet>, Box<PointSet>),
}

/// A subset of a space: an explicit finite set or a named membership test.
#[derive(Clone)]
pub struct PointSet {
    name: String,
    repr: SetRepr,
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSet({})", self.name)
    }
}

impl PointSet {
    pub fn explicit(name: impl Into<String>, points: impl IntoIterator<Item = PointId>) -> Self {
        PointSet {
            name: name.into(),
            repr: SetRepr::Explicit(Arc::new(points.into_iter().collect())),
        }
    }

    pub fn predicate(name: impl Into<String>, f: impl Fn(&PointId) -> bool + Send + Sync + 'static) -> Self {
        PointSet {
            name: name.into(),
            repr: SetRepr::Predicate(Arc::new(move |p| Ok(f(p)))),
        }
    }

    pub fn fallible(name: impl Into<String>, f: impl Fn(&PointId) -> Result<bool> + Send + Sync + 'static) -> Self {
        PointSet {
            name: name.into(),
            repr: SetRepr::Predicate(Arc::new(f)),
        }
    }

    pub fn everything() -> Self {
        PointSet::predicate("X", |_| true)
    }

    pub fn complement(&self) -> Self {
        if let SetRepr::Complement(inner) = &self.repr {
            return (**inner).clone();
        }
        PointSet {
            name: format!("X\\{}", self.name),
            repr: SetRepr::Complement(Box::new(self.clone())),
        }
    }

    pub fn union(&self, other: &PointSet) -> Self {
        PointSet {
            name: format!("{}∪{}", self.name, other.name),
            repr: SetRepr::Union(Box::new(self.clone()), Box::new(other.clone())),
        }
    }

    pub fn intersection(&self, other: &PointSet) -> Self {
        PointSet {
            name: format!("{}∩{}", self.name, other.name),
            repr: SetRepr::Intersection(Box::new(self.clone()), Box::new(other.clone())),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn as_explicit(&self) -> Option<&BTreeSet<PointId>> {
        match &self.repr {
            SetRepr::Explicit(s) => Some(s),
            _ => None,
        }
    }

    pub fn contains(&self, p: &PointId) -> Result<bool> {
        match &self.repr {
            SetRepr::Explicit(s) => Ok(s.contains(p)),
            SetRepr::Predicate(f) => f(p),
            SetRepr::Complement(a) => Ok(!a.contains(p)?),
            SetRepr::Union(a, b) => Ok(a.contains(p)? || b.contains(p)?),
            SetRepr::Intersection(a, b) => Ok(a.contains(p)? && b.contains(p)?),
        }
    }

    /// Members of the set among `points`, in the given order.
    pub fn filter(&self, points: &[PointId]) -> Result<Vec<PointId>> {
        let mut out = Vec::new();
        for p in points {
            if self.contains(p)? {
                out.push(*p);
            }
        }
        Ok(out)
    }
}

/// `d_X(x, A)` over the window, with the exactness flag of the radius argument.
pub fn dist_to_set(space: &MetricSpace, x: &PointId, a: &PointSet, w: &Window) -> Result<Certified<Q>> {
    space.check(x)?;
    let mut best: Option<Q> = None;
    for p in window_points(space, w)? {
        if a.contains(&p)? {
            let d = space.dist(x, &p);
            if best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    let best = best.ok_or_else(|| Error::EmptySet {
        set: a.name().to_string(),
        radius: w.radius,
    })?;
    let required = space.dist(&w.basepoint, x) + best;
    Ok(Certified {
        value: best,
        exact: required <= w.radius,
        required_radius: Some(required),
    })
}

/// `d_X(x, A)` certified by searching balls around `x` of doubling radius up to `cap`.
pub fn certified_dist_to_set(space: &MetricSpace, x: &PointId, a: &PointSet, cap: &Q) -> Result<Q> {
    space.check(x)?;
    if a.contains(x)? {
        return Ok(Q::zero());
    }
    if matches!(space, MetricSpace::NatLine | MetricSpace::IntLine) && cap.is_integer() {
        // Outward scan: the first hit at offset k is at distance exactly k.
        let lo = if matches!(space, MetricSpace::NatLine) { 0 } else { i64::MIN };
        for k in 1..=cap.to_integer() {
            for c in [x.x() - k, x.x() + k] {
                if c >= lo && c.abs() <= COORD_LIMIT && a.contains(&PointId::p1(c))? {
                    return Ok(q(k));
                }
            }
        }
        return Err(Error::EmptySet {
            set: a.name().to_string(),
            radius: *cap,
        });
    }
    if matches!(space, MetricSpace::GeomLine) {
        // Every representable point is scanned; the cap is not needed.
        let mut best: Option<Q> = None;
        for e in 1..=GEOM_MAX_EXP {
            let p = PointId::p1(1i64 << e);
            if a.contains(&p)? {
                let d = space.dist(x, &p);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        let horizon = q((1i64 << (GEOM_MAX_EXP + 1)) - x.x());
        return match best {
            Some(b) if b <= horizon => Ok(b),
            _ => Err(Error::IncompleteEnumeration {
                space: space.name(),
                radius: horizon,
            }),
        };
    }
    let mut r = q(1).min(*cap);
    loop {
        let mut best: Option<Q> = None;
        for p in space.ball(x, &r)? {
            if a.contains(&p)? {
                let d = space.dist(x, &p);
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        if let Some(b) = best {
            return Ok(b);
        }
        if r >= *cap {
            return Err(Error::EmptySet {
                set: a.name().to_string(),
                radius: *cap,
            });
        }
        r = (r * q(2)).min(*cap);
    }
}

/// Whether `d_X(x, A) <= r`, decided exactly from the ball `B(x, r)`.
pub fn within(space: &MetricSpace, x: &PointId, a: &PointSet, r: &Q) -> Result<bool> {
    for p in space.ball(x, r)? {
        if a.contains(&p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `N_r(A) ∩ W` as an explicit set. Balls that leave the window are searched in the
/// whole space, so the answer is always certified.
pub fn neighborhood(space: &MetricSpace, a: &PointSet, r: &Q, w: &Window) -> Result<Certified<PointSet>> {
    if r.is_negative() {
        return Err(Error::domain("neighborhood radius must be nonnegative"));
    }
    let pts = window_points(space, w)?;
    let members: Vec<PointId> = a.filter(&pts)?;
    let hits = par::try_map(&pts, |x| -> Result<bool> {
        if members.iter().any(|m| space.dist(x, m) <= *r) {
            return Ok(true);
        }
        if w.covers_ball(space, x, r) {
            return Ok(false);
        }
        within(space, x, a, r)
    })?;
    let required = pts
        .iter()
        .map(|x| space.dist(&w.basepoint, x) + r)
        .max()
        .unwrap_or(*r);
    let set = PointSet::explicit(
        format!("N_{}({})∩W", format_q(r), a.name()),
        pts.iter().zip(&hits).filter(|(_, h)| **h).map(|(p, _)| *p),
    );
    Ok(Certified {
        value: set,
        exact: true,
        required_radius: Some(required),
    })
}
