//! Projections as level functions, the function lattice `𝒞_m(X)`, and type classification.
//!
//! An expanding sequence `{A_n}` is stored as its level function
//! `λ(x) = min{n : x ∈ A_n}`; `A_n` is the sublevel set `{λ <= n}`. Meet is the
//! pointwise max of levels (intersection of sublevel sets), join the pointwise min.

use crate::double::{is_selfadjoint, DeltaFn, DoubleMetric, Scope};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::rational::{ceil_i64, format_q, level_of, q, ExactQ};
use crate::space::{
    certified_dist_to_set, window_points, Certified, MetricSpace, PointId, PointSet, Window, DEFAULT_SEARCH_CAP,
};
use crate::verdict::{Grid, Series, Status, Verdict, Witness};
use crate::{par, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub enum Tail {
    Expr(Expr),
    Func(LevelFunction),
}

#[derive(Clone)]
pub enum LevelSource {
    /// `λ ≡ 1`, the unit projection.
    Unit,
    /// `𝓔_A`: `A_n = N_{n/2}(A)`, so `λ(x) = max(1, ⌈2 d_X(x, A)⌉)`.
    Subset(PointSet),
    /// `λ(x) = ⌈d(x, x′)⌉`.
    Metric(DoubleMetric),
    /// `λ(x) = ⌈d(x, X′)⌉`, or `⌈d(x′, X)⌉` when `range` is set.
    DistToCopy { d: DoubleMetric, range: bool },
    /// `λ(x) = max(1, ⌈expr⌉)`.
    Expr(Expr),
    Table {
        table: Arc<BTreeMap<PointId, u64>>,
        tail: Option<Tail>,
    },
    Meet(LevelFunction, LevelFunction),
    Join(LevelFunction, LevelFunction),
}

#[derive(Clone)]
pub struct LevelFunction {
    space: MetricSpace,
    name: String,
    src: Arc<LevelSource>,
}

impl fmt::Debug for LevelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LevelFunction({})", self.name)
    }
}

fn from_copy(d: &DoubleMetric, x: &PointId, range: bool) -> Result<Q> {
    let v = if range {
        d.dist_from_copy(x, Scope::Free)?
    } else {
        d.dist_to_copy(x, Scope::Free)?
    };
    Ok(v.value)
}

impl LevelFunction {
    fn make(space: &MetricSpace, name: impl Into<String>, src: LevelSource) -> Self {
        LevelFunction {
            space: space.clone(),
            name: name.into(),
            src: Arc::new(src),
        }
    }

    pub fn unit(space: &MetricSpace) -> Self {
        Self::make(space, "1", LevelSource::Unit)
    }

    /// The zero projection, `𝓔_{x₀}` at the space basepoint.
    pub fn zero(space: &MetricSpace) -> Self {
        let x0 = space.basepoint();
        Self::make(space, "0", LevelSource::Subset(PointSet::explicit(format!("{{{x0}}}"), [x0])))
    }

    pub fn from_subset(space: &MetricSpace, a: PointSet) -> Self {
        let name = format!("E[{}]", a.name());
        Self::make(space, name, LevelSource::Subset(a))
    }

    pub fn from_metric(d: &DoubleMetric) -> Self {
        Self::make(d.space(), format!("λ[{}]", d.name()), LevelSource::Metric(d.clone()))
    }

    pub fn from_expr(space: &MetricSpace, e: Expr) -> Self {
        Self::make(space, format!("λ[{e}]"), LevelSource::Expr(e))
    }

    pub fn from_table(space: &MetricSpace, name: impl Into<String>, table: BTreeMap<PointId, u64>, tail: Option<Tail>) -> Self {
        Self::make(
            space,
            name,
            LevelSource::Table {
                table: Arc::new(table),
                tail,
            },
        )
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn source(&self) -> &LevelSource {
        &self.src
    }

    /// `λ(x)`.
    pub fn level(&self, x: &PointId) -> Result<u64> {
        let s = &self.space;
        match &*self.src {
            LevelSource::Unit => {
                if !s.contains(x) {
                    return Err(Error::domain(format!("{x} is not a point of {}", s.name())));
                }
                Ok(1)
            }
            LevelSource::Subset(a) => {
                let d = certified_dist_to_set(s, x, a, &q(DEFAULT_SEARCH_CAP))?;
                Ok(level_of(&(d * q(2))))
            }
            LevelSource::Metric(d) => Ok(level_of(&d.eval(x, x, Scope::Free)?.value)),
            LevelSource::DistToCopy { d, range } => Ok(level_of(&from_copy(d, x, *range)?)),
            LevelSource::Expr(e) => Ok(level_of(&e.eval(s, x)?)),
            LevelSource::Table { table, tail } => match (table.get(x), tail) {
                (Some(v), _) => Ok(*v),
                (None, Some(Tail::Expr(e))) => Ok(level_of(&e.eval(s, x)?)),
                (None, Some(Tail::Func(f))) => f.level(x),
                (None, None) => Err(Error::inconclusive(format!("{}: no level recorded for {x}", self.name), None)),
            },
            LevelSource::Meet(a, b) => Ok(a.level(x)?.max(b.level(x)?)),
            LevelSource::Join(a, b) => Ok(a.level(x)?.min(b.level(x)?)),
        }
    }

    /// `A_n` as a membership test.
    pub fn sublevel_set(&self, n: u64) -> PointSet {
        let me = self.clone();
        PointSet::fallible(format!("{}≤{n}", self.name), move |x| Ok(me.level(x)? <= n))
    }

    /// Levels of every window point, computed in parallel.
    pub fn tabulate(&self, w: &Window) -> Result<LevelTable> {
        let points = window_points(&self.space, w)?;
        let levels = par::try_map(&points, |x| self.level(x))?;
        let base_dist = points.iter().map(|x| self.space.dist(&w.basepoint, x)).collect();
        Ok(LevelTable {
            window: w.clone(),
            points,
            levels,
            base_dist,
        })
    }

    /// Same function with the window's levels memoized.
    pub fn cached(&self, w: &Window) -> Result<LevelFunction> {
        let t = self.tabulate(w)?;
        Ok(LevelFunction::from_table(
            &self.space,
            self.name.clone(),
            t.points.iter().copied().zip(t.levels.iter().copied()).collect(),
            Some(Tail::Func(self.clone())),
        ))
    }

    /// `{"space":…, "levels":[[point, level], …], "tail": expr | null}`.
    pub fn to_json(&self, w: &Window) -> Result<String> {
        let t = self.tabulate(w)?;
        let tail = match &*self.src {
            LevelSource::Expr(e) => Some(e.source().to_string()),
            LevelSource::Table {
                tail: Some(Tail::Expr(e)),
                ..
            } => Some(e.source().to_string()),
            LevelSource::Unit => Some("1".to_string()),
            _ => None,
        };
        let doc = LevelDoc {
            space: self.space.name(),
            name: Some(self.name.clone()),
            levels: t.points.iter().copied().zip(t.levels.iter().copied()).collect(),
            tail,
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(space: &MetricSpace, text: &str) -> Result<Self> {
        let doc: LevelDoc = serde_json::from_str(text)?;
        if doc.space != space.name() {
            return Err(Error::domain(format!("levels belong to {} not {}", doc.space, space.name())));
        }
        let mut table = BTreeMap::new();
        for (p, l) in doc.levels {
            if !space.contains(&p) {
                return Err(Error::domain(format!("{p} is not a point of {}", space.name())));
            }
            if l == 0 {
                return Err(Error::domain(format!("level of {p} must be at least 1")));
            }
            table.insert(p, l);
        }
        let tail = doc.tail.map(|t| Expr::parse(&t)).transpose()?.map(Tail::Expr);
        Ok(Self::from_table(space, doc.name.unwrap_or_else(|| "levels".into()), table, tail))
    }
}

#[derive(Serialize, Deserialize)]
struct LevelDoc {
    space: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    levels: Vec<(PointId, u64)>,
    tail: Option<String>,
}

/// Levels of the points of one window, in window order.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    pub window: Window,
    pub points: Vec<PointId>,
    pub levels: Vec<u64>,
    /// `d_X(x, basepoint)` for each point.
    pub base_dist: Vec<Q>,
}

impl LevelTable {
    /// The table of the smaller concentric window of radius `r`.
    pub fn restrict(&self, r: &Q) -> LevelTable {
        let keep: Vec<usize> = (0..self.points.len()).filter(|&i| self.base_dist[i] <= *r).collect();
        LevelTable {
            window: self.window.with_radius(*r),
            points: keep.iter().map(|&i| self.points[i]).collect(),
            levels: keep.iter().map(|&i| self.levels[i]).collect(),
            base_dist: keep.iter().map(|&i| self.base_dist[i]).collect(),
        }
    }

    pub fn get(&self, p: &PointId) -> Option<u64> {
        self.points.binary_search(p).ok().map(|i| self.levels[i])
    }

    pub fn sublevel(&self, n: u64) -> Vec<PointId> {
        self.points.iter().zip(&self.levels).filter(|(_, l)| **l <= n).map(|(p, _)| *p).collect()
    }

    pub fn realized(&self) -> BTreeSet<u64> {
        self.levels.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub e1_some_finite: bool,
    pub e2_half_neighborhood: bool,
    pub e3_all_finite: bool,
    pub violation: Option<String>,
}

impl LevelReport {
    pub fn passed(&self) -> bool {
        self.e1_some_finite && self.e2_half_neighborhood && self.e3_all_finite
    }
}

/// Checks (e1)–(e3) on the window.
pub fn validate_levels(e: &LevelFunction, w: &Window) -> Result<LevelReport> {
    let s = e.space();
    let pts = window_points(s, w)?;
    let levels: Vec<Option<u64>> = par::map(&pts, |x| e.level(x).ok());
    let mut r = LevelReport {
        e1_some_finite: levels.iter().any(|l| l.is_some()),
        e2_half_neighborhood: true,
        e3_all_finite: levels.iter().all(|l| l.is_some()),
        violation: None,
    };
    if let Some(i) = levels.iter().position(|l| l.is_none()) {
        r.violation = Some(format!("no finite level at {}", pts[i]));
    }
    let half = Q::new(1, 2);
    for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate() {
            if let (Some(lx), Some(ly)) = (levels[i], levels[j]) {
                if i != j && s.dist(x, y) <= half && lx > ly + 1 {
                    r.e2_half_neighborhood = false;
                    r.violation.get_or_insert(format!("λ({x}) = {lx} > λ({y}) + 1 with d_X <= 1/2"));
                }
            }
        }
    }
    Ok(r)
}

/// Levels `λ(x) = min{n : d(x, x′) <= n}`, checked to be computable on the window.
pub fn levels_from_metric(d: &DoubleMetric, w: &Window) -> Result<LevelFunction> {
    let e = LevelFunction::from_metric(d);
    e.tabulate(w)?;
    Ok(e)
}

pub fn delta_from_levels(e: &LevelFunction) -> DeltaFn {
    DeltaFn::Levels(e.clone())
}

/// `d_𝒜`, the δ-generated metric of the expanding sequence.
pub fn metric_from_levels(e: &LevelFunction) -> DoubleMetric {
    DoubleMetric::delta(e.space(), delta_from_levels(e)).named(format!("d[{}]", e.name()))
}

pub fn subset_metric(space: &MetricSpace, a: PointSet) -> Result<DoubleMetric> {
    DoubleMetric::subset(space, a)
}

pub fn meet(e: &LevelFunction, f: &LevelFunction) -> Result<LevelFunction> {
    same_space(e, f)?;
    Ok(LevelFunction::make(
        e.space(),
        format!("({}∧{})", e.name, f.name),
        LevelSource::Meet(e.clone(), f.clone()),
    ))
}

pub fn join(e: &LevelFunction, f: &LevelFunction) -> Result<LevelFunction> {
    same_space(e, f)?;
    Ok(LevelFunction::make(
        e.space(),
        format!("({}∨{})", e.name, f.name),
        LevelSource::Join(e.clone(), f.clone()),
    ))
}

fn same_space(e: &LevelFunction, f: &LevelFunction) -> Result<()> {
    if e.space != f.space {
        return Err(Error::domain(format!("{} and {} live on different spaces", e.name, f.name)));
    }
    Ok(())
}

/// Exact value when possible; window value for kernels without a finite free search.
fn value_on(d: &DoubleMetric, x: &PointId, y: &PointId, w: &Window) -> Result<Certified<Q>> {
    match d.eval(x, y, Scope::Free) {
        Err(Error::Inconclusive { .. }) => d.eval(x, y, Scope::Window(w)),
        r => r,
    }
}

fn copy_value_on(d: &DoubleMetric, x: &PointId, w: &Window) -> Result<Certified<Q>> {
    match d.dist_to_copy(x, Scope::Free) {
        Err(Error::Inconclusive { .. }) => d.dist_to_copy(x, Scope::Window(w)),
        r => r,
    }
}

/// Searches `(α, β)` with `d(x, x′) <= β·(d(x, X′) + α)` on every window point.
/// The witness `(0, 2)` is tried first, then the grid in β-major order.
pub fn projection_criterion(d: &DoubleMetric, w: &Window, grid: &Grid) -> Result<Verdict> {
    if !is_selfadjoint(d, w)? {
        return Err(Error::domain(format!("{} is not selfadjoint on the window", d.name())));
    }
    let pts = window_points(d.space(), w)?;
    let vals = par::try_map(&pts, |x| -> Result<(Q, Q, bool)> {
        let f = value_on(d, x, x, w)?;
        let g = copy_value_on(d, x, w)?;
        Ok((f.value, g.value, f.exact && g.exact))
    })?;
    let claim = format!("{} is a projection", d.name());
    let mut ratios = Series::new("d(x,x')/d(x,X')");
    for (x, (f, g, _)) in pts.iter().zip(&vals) {
        ratios.push(q(d.space().dist(&w.basepoint, x).to_integer()), f / g);
    }
    if let Some(i) = vals.iter().position(|v| !v.2) {
        return Ok(Verdict::inconclusive(claim, "inexact", w)
            .with_series(ratios)
            .with_note(format!("values at {} are not certified by the window", pts[i])));
    }
    let fits = |(a, b): (u64, u64)| vals.iter().all(|(f, g, _)| *f <= q(b as i64) * (g + q(a as i64)));
    let found = std::iter::once((0, 2)).chain(grid.pairs()).find(|&p| fits(p));
    Ok(match found {
        Some((alpha, beta)) => {
            Verdict::certified(claim, "projection", Witness::Affine { alpha, beta }, w).with_series(ratios)
        }
        None => Verdict::inconclusive(claim, "no-affine-witness", w).with_series(ratios),
    })
}

/// A function in `𝒞_m(X)` candidate: positive and 2-Lipschitz.
#[derive(Clone)]
pub struct CmFunction {
    space: MetricSpace,
    name: String,
    f: Arc<dyn Fn(&PointId) -> Result<Q> + Send + Sync>,
}

impl fmt::Debug for CmFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CmFunction({})", self.name)
    }
}

impl CmFunction {
    pub fn new(space: &MetricSpace, name: impl Into<String>, f: impl Fn(&PointId) -> Result<Q> + Send + Sync + 'static) -> Self {
        CmFunction {
            space: space.clone(),
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn from_expr(space: &MetricSpace, e: Expr) -> Self {
        let s = space.clone();
        let name = e.to_string();
        Self::new(space, name, move |x| e.eval(&s, x))
    }

    pub fn eval(&self, x: &PointId) -> Result<Q> {
        (self.f)(x)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `f ∧ g = max(f, g)`.
    pub fn meet(&self, g: &CmFunction) -> CmFunction {
        let (a, b) = (self.clone(), g.clone());
        Self::new(&self.space, format!("max({},{})", self.name, g.name), move |x| Ok(a.eval(x)?.max(b.eval(x)?)))
    }

    /// `f ∨ g = min(f, g)`.
    pub fn join(&self, g: &CmFunction) -> CmFunction {
        let (a, b) = (self.clone(), g.clone());
        Self::new(&self.space, format!("min({},{})", self.name, g.name), move |x| Ok(a.eval(x)?.min(b.eval(x)?)))
    }
}

/// `F(d)(x) = d(x, x′)`.
pub fn f_map(d: &DoubleMetric, w: &Window) -> Result<CmFunction> {
    let (dd, ww) = (d.clone(), w.clone());
    let f = CmFunction::new(d.space(), format!("F[{}]", d.name()), move |x| Ok(value_on(&dd, x, x, &ww)?.value));
    for x in window_points(d.space(), w)? {
        f.eval(&x)?;
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CmReport {
    pub function: String,
    pub min_value: ExactQ,
    pub f1_positive: bool,
    pub f2_lipschitz: bool,
    pub violation: Option<String>,
}

impl CmReport {
    pub fn passed(&self) -> bool {
        self.f1_positive && self.f2_lipschitz
    }
}

/// (f1) `f >= eps` and (f2) `|f(x) - f(y)| <= 2 d_X(x, y)` on all window pairs.
pub fn check_cm(f: &CmFunction, w: &Window, eps: &Q) -> Result<CmReport> {
    let pts = window_points(&f.space, w)?;
    let vals = par::try_map(&pts, |x| f.eval(x))?;
    let min_value = vals.iter().copied().min().unwrap_or_else(Q::zero);
    let mut r = CmReport {
        function: f.name.clone(),
        min_value: min_value.into(),
        f1_positive: min_value >= *eps && min_value.is_positive(),
        f2_lipschitz: true,
        violation: None,
    };
    if !r.f1_positive {
        r.violation = Some(format!("minimum {} is below {}", format_q(&min_value), format_q(eps)));
    }
    'outer: for (i, x) in pts.iter().enumerate() {
        for (j, y) in pts.iter().enumerate().skip(i + 1) {
            let gap = (vals[i] - vals[j]).abs();
            if gap > q(2) * f.space.dist(x, y) {
                r.f2_lipschitz = false;
                r.violation.get_or_insert(format!(
                    "|f({x}) - f({y})| = {} > 2·{}",
                    format_q(&gap),
                    format_q(&f.space.dist(x, y))
                ));
                break 'outer;
            }
        }
    }
    Ok(r)
}

fn require_projection(d: &DoubleMetric, w: &Window) -> Result<()> {
    let v = projection_criterion(d, w, &Grid::default())?;
    if !v.is_certified() {
        return Err(Error::domain(format!("{} is not certified as a projection on the window", d.name())));
    }
    Ok(())
}

/// Pointwise max; represents `F(d1) ∧ F(d2)`.
pub fn metric_meet(d1: &DoubleMetric, d2: &DoubleMetric, w: &Window) -> Result<DoubleMetric> {
    require_projection(d1, w)?;
    require_projection(d2, w)?;
    DoubleMetric::pointwise_max(d1, d2)
}

/// The min-glue kernel; represents `F(d1) ∨ F(d2)`.
pub fn metric_join(d1: &DoubleMetric, d2: &DoubleMetric, w: &Window) -> Result<DoubleMetric> {
    require_projection(d1, w)?;
    require_projection(d2, w)?;
    DoubleMetric::min_glue(d1, d2)
}

fn copy_levels(d: &DoubleMetric, w: &Window, range: bool) -> Result<LevelFunction> {
    let tag = if range { "range" } else { "source" };
    let e = LevelFunction::make(
        d.space(),
        format!("{tag}[{}]", d.name()),
        LevelSource::DistToCopy { d: d.clone(), range },
    );
    match e.tabulate(w) {
        Ok(_) => Ok(e),
        Err(Error::Inconclusive { .. }) => {
            // Fall back to window values, which must all be certified.
            let target = if range { d.adjoint() } else { d.clone() };
            let pts = window_points(d.space(), w)?;
            let vals = par::try_map(&pts, |x| target.dist_to_copy(x, Scope::Window(w)))?;
            if let Some((x, v)) = pts.iter().zip(&vals).find(|(_, v)| !v.exact) {
                return Err(Error::inconclusive(
                    format!("{tag} level of {} at {x} is not certified by the window", d.name()),
                    v.required_radius,
                ));
            }
            let table = pts.iter().copied().zip(vals.iter().map(|v| level_of(&v.value))).collect();
            Ok(LevelFunction::from_table(d.space(), e.name, table, None))
        }
        Err(err) => Err(err),
    }
}

/// `A_n = {x : d(x, X′) <= n}`.
pub fn source_projection(d: &DoubleMetric, w: &Window) -> Result<LevelFunction> {
    copy_levels(d, w, false)
}

/// `A_n = {x : d(x′, X) <= n}`.
pub fn range_projection(d: &DoubleMetric, w: &Window) -> Result<LevelFunction> {
    copy_levels(d, w, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeParams {
    pub n_max: u64,
    pub k_max: u64,
    pub m_max: u64,
}

impl Default for TypeParams {
    fn default() -> Self {
        TypeParams {
            n_max: 8,
            k_max: 64,
            m_max: 24,
        }
    }
}

/// `K[n][m]`: the least integer `k` with `A_m ∩ W ⊆ N_k(A_n)`, `None` when above `k_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreTable {
    pub params: TypeParams,
    pub k: Vec<Vec<Option<u64>>>,
    pub empty_core: Vec<bool>,
}

impl CoreTable {
    pub fn k(&self, n: u64, m: u64) -> Option<u64> {
        self.k[(n - 1) as usize][(m - 1) as usize]
    }

    /// `max_m k(n, m)`; `None` when some `m` needs more than `k_max`.
    pub fn worst(&self, n: u64) -> Option<u64> {
        self.k[(n - 1) as usize].iter().try_fold(0, |acc, k| k.map(|k| acc.max(k)))
    }
}

/// Computes the core table on one window.
pub fn core_table(e: &LevelFunction, w: &Window, params: TypeParams) -> Result<CoreTable> {
    let s = e.space();
    let t = e.tabulate(w)?;
    let kmax = q(params.k_max as i64);
    let (nm, mm) = (params.n_max as usize, params.m_max as usize);
    let idx: Vec<usize> = (0..t.len()).filter(|&i| t.levels[i] <= params.m_max).collect();
    // For each relevant point, the distance to A_n for n = 1..n_max (None if beyond k_max).
    let per_point = par::try_map(&idx, |&i| -> Result<(u64, Vec<Option<Q>>)> {
        let x = &t.points[i];
        let mut best: Vec<Option<Q>> = vec![None; nm];
        for y in s.ball(x, &kmax)? {
            let ly = match t.get(&y) {
                Some(l) => l,
                None => e.level(&y)?,
            };
            if ly as usize <= nm {
                let d = s.dist(x, &y);
                for b in best.iter_mut().skip(ly as usize - 1) {
                    if b.is_none_or(|v| d < v) {
                        *b = Some(d);
                    }
                }
            }
        }
        Ok((t.levels[i], best))
    })?;
    let mut k = vec![vec![Some(0u64); mm]; nm];
    for (lx, best) in &per_point {
        for n in 0..nm {
            let need = best[n].map(|d| ceil_i64(&d) as u64);
            for m in (*lx as usize - 1)..mm {
                k[n][m] = match (k[n][m], need) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
            }
        }
    }
    let empty_core = (1..=params.n_max).map(|n| t.levels.iter().all(|&l| l > n)).collect();
    Ok(CoreTable { params, k, empty_core })
}

/// Type I on one window: some core `n <= n_max` with `A_m ∩ W ⊆ N_k(A_n)` for every `m <= m_max`.
pub fn classify_type(e: &LevelFunction, w: &Window, params: TypeParams) -> Result<Verdict> {
    let table = core_table(e, w, params)?;
    let claim = format!("{} is of type I", e.name());
    let mut worst = Series::new("max_m k(n,m)");
    for n in 1..=params.n_max {
        if let Some(k) = table.worst(n) {
            worst.push_int(n as i64, k as i64);
        }
    }
    let core = (1..=params.n_max).find(|&n| !table.empty_core[(n - 1) as usize] && table.worst(n).is_some());
    Ok(match core {
        Some(n) => {
            let k_table = (1..=params.m_max).map(|m| (m, table.k(n, m).unwrap())).collect();
            Verdict::certified(claim, "type-I", Witness::TypeI { core: n, k_table }, w).with_series(worst)
        }
        None => Verdict::inconclusive(claim, "no-type-I-core", w).with_series(worst),
    })
}

/// Type classification across increasing radii: certified type I if one core works at
/// every radius; type II evidence if, for every `n`, the required `k` strictly grows.
pub fn classify_sweep(e: &LevelFunction, radii: &[Q], params: TypeParams) -> Result<Verdict> {
    if radii.len() < 3 || radii.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::domain("a sweep needs at least three strictly increasing radii"));
    }
    let base = e.space().basepoint();
    let top = Window::new(*radii.last().unwrap(), base);
    let tables = radii
        .iter()
        .map(|r| core_table(e, &Window::new(*r, base), params))
        .collect::<Result<Vec<_>>>()?;
    let claim = format!("type of {}", e.name());
    let mut series = Vec::new();
    let mut all_grow = true;
    for n in 1..=params.n_max {
        let mut s = Series::new(format!("K({n})"));
        let ks: Vec<Option<u64>> = tables.iter().map(|t| t.worst(n)).collect();
        for (r, k) in radii.iter().zip(&ks) {
            s.push(*r, q(k.map_or(-1, |k| k as i64)));
        }
        let empty = tables.last().unwrap().empty_core[(n - 1) as usize];
        // None means "more than k_max", i.e. larger than any finite value.
        let grows = ks.windows(2).all(|p| match (p[0], p[1]) {
            (Some(a), Some(b)) => a < b,
            (Some(_), None) => true,
            _ => false,
        });
        all_grow &= empty || grows;
        series.push(s);
    }
    let per_radius = radii
        .iter()
        .map(|r| classify_type(e, &Window::new(*r, base), params))
        .collect::<Result<Vec<_>>>()?;
    let cores: Vec<Option<u64>> = per_radius
        .iter()
        .map(|v| match &v.witness {
            Some(Witness::TypeI { core, .. }) => Some(*core),
            _ => None,
        })
        .collect();
    // Growth of every K(n) takes precedence: a single finite window always admits some k.
    let mut v = if all_grow {
        Verdict::inconclusive(claim, "type-II-evidence", &top)
    } else if cores.iter().all(|c| c.is_some() && *c == cores[0]) {
        per_radius.last().unwrap().clone()
    } else {
        Verdict::inconclusive(claim, "unclassified", &top)
    };
    v.diagnostics.series.extend(series);
    v.diagnostics.trend = Some(if all_grow {
        "growing".into()
    } else if v.status == Status::CertifiedOnWindow {
        "stable".into()
    } else {
        "mixed".into()
    });
    Ok(v)
}
