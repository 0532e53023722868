//! Density functionals on a radius schedule, the induced `ν̂` on projections and `ν̄` on
//! formal sums, and the counting laws they satisfy.
//!
//! Every per-radius value is an exact ratio of counts (or weight sums). Limits are
//! replaced by the interval `[min, max]` over the tail half of the schedule.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::projection::{join, meet, LevelFunction, LevelTable};
use crate::rational::{q, ExactQ};
use crate::space::{within, window_points, MetricSpace, PointId, PointSet, Window};
use crate::{par, Q};
use num_traits::{Signed, Zero};
use serde::Serialize;

/// Largest generator list accepted by [`nu_bar`] (the alternating sum has `2^k` terms).
pub const NU_BAR_MAX: usize = 12;

#[derive(Debug, Clone)]
pub enum DensityKind {
    /// Counting in `B_R(x₀)`.
    Ball,
    /// Counting in `B_R(x₀) ∖ B_{R/2}(x₀)`; bounded sets vanish exactly once `R/2` covers them.
    Shell,
    /// Weighted counting in `B_R(x₀)` with a nonnegative weight expression.
    Weighted(Expr),
}

#[derive(Debug, Clone)]
pub struct DensityMeasure {
    pub space: MetricSpace,
    pub kind: DensityKind,
    pub schedule: Vec<Q>,
}

/// `32, 64, …, 1024`.
pub fn default_schedule() -> Vec<Q> {
    (0..6).map(|i| q(32 << i)).collect()
}

impl DensityMeasure {
    pub fn new(space: &MetricSpace, kind: DensityKind, schedule: Vec<Q>) -> Result<Self> {
        if schedule.len() < 3 || schedule.windows(2).any(|p| p[0] >= p[1]) || !schedule[0].is_positive() {
            return Err(Error::domain("a schedule needs at least three strictly increasing positive radii"));
        }
        Ok(DensityMeasure {
            space: space.clone(),
            kind,
            schedule,
        })
    }

    /// Shell density on the default schedule.
    pub fn natural(space: &MetricSpace) -> Self {
        Self::new(space, DensityKind::Shell, default_schedule()).expect("default schedule is valid")
    }

    pub fn describe(&self) -> String {
        let kind = match &self.kind {
            DensityKind::Ball => "ball".to_string(),
            DensityKind::Shell => "shell".to_string(),
            DensityKind::Weighted(e) => format!("weighted[{e}]"),
        };
        format!("{kind}-density on {}", self.space.name())
    }

    pub fn window(&self) -> Window {
        Window::new(*self.schedule.last().unwrap(), self.space.basepoint())
    }

    fn frame(&self) -> Result<Frame> {
        let w = self.window();
        let points = window_points(&self.space, &w)?;
        let dist: Vec<Q> = points.iter().map(|p| self.space.dist(&w.basepoint, p)).collect();
        let weight = match &self.kind {
            DensityKind::Weighted(e) => points
                .iter()
                .map(|p| {
                    let v = e.eval(&self.space, p)?;
                    if v.is_negative() {
                        Err(Error::domain(format!("negative weight at {p}")))
                    } else {
                        Ok(v)
                    }
                })
                .collect::<Result<Vec<_>>>()
                .map(Some)?,
            _ => None,
        };
        Ok(Frame { points, dist, weight })
    }

    fn in_region(&self, d: &Q, r: &Q) -> bool {
        match self.kind {
            DensityKind::Shell => *d <= *r && *d > *r / q(2),
            _ => *d <= *r,
        }
    }

    /// Exact `μ_R(member)` for each radius of the schedule.
    fn ratios(&self, f: &Frame, member: &[bool]) -> Vec<Q> {
        self.schedule
            .iter()
            .map(|r| {
                let half = *r / q(2);
                let inside = |i: usize| match self.kind {
                    DensityKind::Shell => f.dist[i] <= *r && f.dist[i] > half,
                    _ => f.dist[i] <= *r,
                };
                match &f.weight {
                    None => {
                        let (mut num, mut den) = (0i64, 0i64);
                        for i in (0..f.points.len()).filter(|&i| inside(i)) {
                            den += 1;
                            num += member[i] as i64;
                        }
                        if den == 0 {
                            q(0)
                        } else {
                            Q::new(num, den)
                        }
                    }
                    Some(wt) => {
                        let (mut num, mut den) = (q(0), q(0));
                        for i in (0..f.points.len()).filter(|&i| inside(i)) {
                            den += wt[i];
                            if member[i] {
                                num += wt[i];
                            }
                        }
                        if den.is_zero() {
                            q(0)
                        } else {
                            num / den
                        }
                    }
                }
            })
            .collect()
    }

    fn interval(&self, values: Vec<Q>) -> DensityInterval {
        DensityInterval::from_series(&self.schedule, values)
    }
}

struct Frame {
    points: Vec<PointId>,
    dist: Vec<Q>,
    /// `None` for plain counting.
    weight: Option<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityInterval {
    pub lo: ExactQ,
    pub hi: ExactQ,
    /// `(R, value)` for every radius of the schedule.
    pub series: Vec<(ExactQ, ExactQ)>,
}

impl DensityInterval {
    /// Interval over the last `⌈len/2⌉` values.
    pub fn from_series(radii: &[Q], values: Vec<Q>) -> Self {
        let tail = &values[values.len() / 2..];
        DensityInterval {
            lo: (*tail.iter().min().unwrap()).into(),
            hi: (*tail.iter().max().unwrap()).into(),
            series: radii.iter().zip(&values).map(|(r, v)| ((*r).into(), (*v).into())).collect(),
        }
    }

    pub fn values(&self) -> Vec<Q> {
        self.series.iter().map(|(_, v)| v.0).collect()
    }

    pub fn contains(&self, v: &Q) -> bool {
        self.lo.0 <= *v && *v <= self.hi.0
    }

    pub fn within(&self, lo: &Q, hi: &Q) -> bool {
        *lo <= self.lo.0 && self.hi.0 <= *hi
    }

    pub fn overlaps(&self, other: &DensityInterval) -> bool {
        self.lo.0 <= other.hi.0 && other.lo.0 <= self.hi.0
    }

    pub fn is_exactly(&self, v: &Q) -> bool {
        self.series.iter().all(|(_, x)| x.0 == *v)
    }
}

/// `μ(A)` as an interval.
pub fn density(mu: &DensityMeasure, a: &PointSet) -> Result<DensityInterval> {
    let f = mu.frame()?;
    let member = par::try_map(&f.points, |p| a.contains(p))?;
    Ok(mu.interval(mu.ratios(&f, &member)))
}

fn table_on(mu: &DensityMeasure, f: &Frame, e: &LevelFunction) -> Result<LevelTable> {
    let t = e.tabulate(&mu.window())?;
    debug_assert_eq!(t.points, f.points);
    Ok(t)
}

/// `ν̂(e)` with the per-`n` densities of `A_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuHat {
    pub measure: String,
    pub projection: String,
    pub per_n: Vec<PerN>,
    pub interval: DensityInterval,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PerN {
    pub n: u64,
    pub series: Vec<(ExactQ, ExactQ)>,
}

/// `ν̂(e) = sup_n μ(A_n)`; per radius this is `μ_R(A_{n_max})`, and monotonicity in `n`
/// is asserted exactly.
pub fn nu_hat(mu: &DensityMeasure, e: &LevelFunction, n_max: u64) -> Result<NuHat> {
    let f = mu.frame()?;
    let t = table_on(mu, &f, e)?;
    let mut per_n = Vec::new();
    let mut prev: Option<Vec<Q>> = None;
    for n in 1..=n_max {
        let member: Vec<bool> = t.levels.iter().map(|l| *l <= n).collect();
        let vals = mu.ratios(&f, &member);
        if let Some(p) = &prev {
            if p.iter().zip(&vals).any(|(a, b)| a > b) {
                return Err(Error::domain(format!("μ(A_n) decreased at n = {n}")));
            }
        }
        per_n.push(PerN {
            n,
            series: mu.schedule.iter().zip(&vals).map(|(r, v)| ((*r).into(), (*v).into())).collect(),
        });
        prev = Some(vals);
    }
    let top = prev.ok_or_else(|| Error::domain("n_max must be at least 1"))?;
    Ok(NuHat {
        measure: mu.describe(),
        projection: e.name().to_string(),
        per_n,
        interval: mu.interval(top),
    })
}

/// `ν̄(e₁ + … + e_k) = Σ_i (-2)^{i-1} σ_i`, `σ_i` summing `ν̂` over the `i`-fold meets.
/// Evaluated exactly per radius, then turned into an interval.
pub fn nu_bar(mu: &DensityMeasure, gens: &[LevelFunction], n_max: u64) -> Result<DensityInterval> {
    if gens.is_empty() {
        return Ok(mu.interval(vec![q(0); mu.schedule.len()]));
    }
    if gens.len() > NU_BAR_MAX {
        return Err(Error::TooManyGenerators(gens.len()));
    }
    let w = mu.window();
    let cached = gens.iter().map(|g| g.cached(&w)).collect::<Result<Vec<_>>>()?;
    let subsets: Vec<usize> = (1..1usize << gens.len()).collect();
    let terms = par::try_map(&subsets, |&mask| -> Result<Vec<Q>> {
        let mut it = (0..cached.len()).filter(|i| mask >> i & 1 == 1);
        let first = cached[it.next().unwrap()].clone();
        let m = it.try_fold(first, |acc, i| meet(&acc, &cached[i]))?;
        let nh = nu_hat(mu, &m, n_max)?;
        let sign = q((-2i64).pow(mask.count_ones() - 1));
        Ok(nh.interval.values().into_iter().map(|v| v * sign).collect())
    })?;
    let mut total = vec![q(0); mu.schedule.len()];
    for t in terms {
        for (a, b) in total.iter_mut().zip(t) {
            *a += b;
        }
    }
    Ok(mu.interval(total))
}

/// Independent evaluation of `ν̄`: density of points lying in an odd number of the `A_{n_max}`.
pub fn nu_bar_parity(mu: &DensityMeasure, gens: &[LevelFunction], n_max: u64) -> Result<DensityInterval> {
    let f = mu.frame()?;
    let tables = gens.iter().map(|g| table_on(mu, &f, g)).collect::<Result<Vec<_>>>()?;
    let member: Vec<bool> = (0..f.points.len())
        .map(|i| tables.iter().filter(|t| t.levels[i] <= n_max).count() % 2 == 1)
        .collect();
    Ok(mu.interval(mu.ratios(&f, &member)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModularityReport {
    /// `|A∩B| + |A∪B| = |A| + |B|` at every radius and every `n <= n_max`.
    pub counts_exact: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    /// `ν̂(e∧f) + ν̂(e∨f)` and `ν̂(e) + ν̂(f)` per radius.
    pub lhs: Vec<ExactQ>,
    pub rhs: Vec<ExactQ>,
    pub interval_ok: bool,
    /// `ν̄(𝟏 + e) = 1 - ν̂(e)`, per radius.
    pub complement_ok: bool,
}

impl ModularityReport {
    pub fn passed(&self) -> bool {
        self.counts_exact && self.interval_ok && self.complement_ok
    }
}

/// Modularity of `ν̂` on `e, f`, checked on sublevel counts and on values, plus the
/// complement law for `e`.
pub fn check_modularity(mu: &DensityMeasure, e: &LevelFunction, f: &LevelFunction, n_max: u64) -> Result<ModularityReport> {
    let fr = mu.frame()?;
    let w = mu.window();
    let (e, f) = (&e.cached(&w)?, &f.cached(&w)?);
    let (m, j) = (meet(e, f)?, join(e, f)?);
    let [te, tf, tm, tj] = [e, f, &m, &j].map(|g| table_on(mu, &fr, g));
    let (te, tf, tm, tj) = (te?, tf?, tm?, tj?);
    let mut failures = Vec::new();
    let mut checks = 0;
    for r in &mu.schedule {
        for n in 1..=n_max {
            let count = |t: &LevelTable| {
                (0..fr.points.len())
                    .filter(|&i| mu.in_region(&fr.dist[i], r) && t.levels[i] <= n)
                    .count()
            };
            checks += 1;
            let (a, b, c, d) = (count(&te), count(&tf), count(&tm), count(&tj));
            if c + d != a + b {
                failures.push(format!("R={r}, n={n}: |A∩B|+|A∪B| = {} but |A|+|B| = {}", c + d, a + b));
            }
        }
    }
    let hat = |g: &LevelFunction| nu_hat(mu, g, n_max).map(|h| h.interval);
    let (he, hf, hm, hj) = (hat(e)?, hat(f)?, hat(&m)?, hat(&j)?);
    let add = |x: &DensityInterval, y: &DensityInterval| -> Vec<Q> {
        x.values().iter().zip(y.values()).map(|(a, b)| a + b).collect()
    };
    let (lhs, rhs) = (add(&hm, &hj), add(&he, &hf));
    let (il, ir) = (mu.interval(lhs.clone()), mu.interval(rhs.clone()));
    let interval_ok = il.overlaps(&ir);
    let comp = nu_bar(mu, &[LevelFunction::unit(&mu.space), e.clone()], n_max)?;
    let complement_ok = comp.values().iter().zip(he.values()).all(|(c, v)| *c == q(1) - v);
    Ok(ModularityReport {
        counts_exact: failures.is_empty(),
        checks,
        failures,
        lhs: lhs.into_iter().map(Into::into).collect(),
        rhs: rhs.into_iter().map(Into::into).collect(),
        interval_ok,
        complement_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Measure0Report {
    pub nu_hat: DensityInterval,
    /// `sup_{n <= n_max} ν̂(𝓔_{A_n})`, per radius.
    pub sup_subsets: DensityInterval,
    /// First `n` at which `ν̂(𝓔_{A_n})` equals `ν̂(e)` at every radius, if any.
    pub exact_at: Option<u64>,
    pub agrees: bool,
}

/// Compares `ν̂(e)` with `sup_n ν̂(𝓔_{A_n})`. The sublevel sets of `𝓔_{A_n}` up to
/// `n_max` are the `n_max/2`-neighbourhoods of `A_n`.
pub fn measure0_check(mu: &DensityMeasure, e: &LevelFunction, n_max: u64) -> Result<Measure0Report> {
    let f = mu.frame()?;
    let outer = Window::new(mu.window().radius + q(n_max as i64), mu.space.basepoint());
    let ec = e.cached(&outer)?;
    let base = nu_hat(mu, &ec, n_max)?.interval;
    let reach = q(n_max as i64) / q(2);
    let mut sup = vec![q(0); mu.schedule.len()];
    let mut exact_at = None;
    for n in 1..=n_max {
        let an = ec.sublevel_set(n);
        let member = par::try_map(&f.points, |p| within(&mu.space, p, &an, &reach))?;
        let vals = mu.ratios(&f, &member);
        if exact_at.is_none() && vals == base.values() {
            exact_at = Some(n);
        }
        for (s, v) in sup.iter_mut().zip(vals) {
            if v > *s {
                *s = v;
            }
        }
    }
    let sup_subsets = mu.interval(sup);
    let agrees = sup_subsets.overlaps(&base);
    Ok(Measure0Report {
        nu_hat: base,
        sup_subsets,
        exact_at,
        agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::DoubleMetric;
    use crate::rational::qr;

    #[test]
    fn densities() {
        let nat = MetricSpace::NatLine;
        let mu = DensityMeasure::natural(&nat);
        let ev = density(&mu, &PointSet::predicate("evens", |x| x.x() % 2 == 0)).unwrap();
        assert!(ev.contains(&qr(1, 2)));
        let sq = density(&mu, &PointSet::predicate("squares", |x| {
            let r = (x.x() as f64).sqrt() as i64;
            (r - 1..=r + 1).any(|s| s >= 0 && s * s == x.x())
        }))
        .unwrap();
        assert!(sq.hi.0 < qr(1, 16));
        let b = density(&mu, &PointSet::explicit("small", [PointId::p1(3), PointId::p1(7)])).unwrap();
        assert!(b.is_exactly(&q(0)));
    }

    #[test]
    fn nu_hat_values() {
        let int = MetricSpace::IntLine;
        let mu = DensityMeasure::natural(&int);
        assert!(nu_hat(&mu, &LevelFunction::unit(&int), 16).unwrap().interval.is_exactly(&q(1)));
        let z = LevelFunction::from_metric(&DoubleMetric::zero_at(&int, PointId::p1(0)).unwrap());
        assert!(nu_hat(&mu, &z, 16).unwrap().interval.is_exactly(&q(0)));
        let half = LevelFunction::from_subset(&int, PointSet::predicate("Z<=0", |x| x.x() <= 0));
        let h = nu_hat(&mu, &half, 16).unwrap();
        assert!(h.interval.within(&(qr(1, 2) - qr(1, 32)), &(qr(1, 2) + qr(1, 32))), "{h:?}");
    }

    #[test]
    fn nu_bar_values() {
        let int = MetricSpace::IntLine;
        let mu = DensityMeasure::natural(&int);
        let neg = LevelFunction::from_subset(&int, PointSet::predicate("Z<=0", |x| x.x() <= 0));
        let pos = LevelFunction::from_subset(&int, PointSet::predicate("Z>=0", |x| x.x() >= 0));
        assert!(nu_bar(&mu, &[neg.clone(), neg.clone()], 8).unwrap().is_exactly(&q(0)));
        assert!(nu_bar(&mu, &[neg.clone(), pos.clone()], 8).unwrap().is_exactly(&q(1)));
        assert!(nu_bar(&mu, &[LevelFunction::unit(&int)], 8).unwrap().is_exactly(&q(1)));
        let gens = [neg.clone(), pos.clone(), LevelFunction::from_subset(&int, PointSet::predicate("evens", |x| x.x() % 2 == 0))];
        assert_eq!(nu_bar(&mu, &gens, 8).unwrap(), nu_bar_parity(&mu, &gens, 8).unwrap());
    }

    #[test]
    fn modularity_and_measure0() {
        let int = MetricSpace::IntLine;
        let mu = DensityMeasure::natural(&int);
        let neg = LevelFunction::from_subset(&int, PointSet::predicate("Z<=0", |x| x.x() <= 0));
        let pos = LevelFunction::from_subset(&int, PointSet::predicate("Z>=0", |x| x.x() >= 0));
        assert!(check_modularity(&mu, &neg, &pos, 8).unwrap().passed());
        assert!(check_modularity(&mu, &neg, &neg, 8).unwrap().passed());
        let r = measure0_check(&mu, &neg, 8).unwrap();
        assert_eq!(r.exact_at, Some(1));
        let nat = MetricSpace::NatLine;
        let mu = DensityMeasure::natural(&nat);
        let root = LevelFunction::from_expr(&nat, Expr::parse("ceilroot(x + 1, 2)").unwrap());
        assert!(measure0_check(&mu, &root, 16).unwrap().agrees);
    }
}
