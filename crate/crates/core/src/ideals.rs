//! Approximate units `u_n(x) = max(0, 1 - d_X(x, A_{2n}))` of a projection and the
//! identities they satisfy on a window.

use crate::asymptotics::transfer_tables;
use crate::error::{Error, Result};
use crate::projection::{LevelFunction, LevelTable};
use crate::rational::q;
use crate::space::{window_points, PointId, Window};
use crate::{par, Q};
use serde::Serialize;
use std::collections::BTreeMap;

/// Units are evaluated lazily from the source's sublevel sets.
#[derive(Debug, Clone)]
pub struct ApproximateUnit {
    pub source: LevelFunction,
}

impl ApproximateUnit {
    pub fn new(source: &LevelFunction) -> Self {
        ApproximateUnit { source: source.clone() }
    }

    /// `u_n(x)`. Only points within distance 1 matter, so the ball `B(x, 1)` decides it exactly.
    pub fn eval(&self, n: u64, x: &PointId) -> Result<Q> {
        if n == 0 {
            return Err(Error::domain("approximate units are indexed from n = 1"));
        }
        let s = self.source.space();
        let mut best: Option<Q> = None;
        for y in s.ball(x, &q(1))? {
            if self.source.level(&y)? <= 2 * n {
                let d = s.dist(x, &y);
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        Ok(best.map_or(q(0), |d| (q(1) - d).max(q(0))))
    }

    fn values(&self, n: u64, pts: &[PointId]) -> Result<Vec<Q>> {
        par::try_map(pts, |x| self.eval(n, x))
    }
}

/// `u_n(x)` for `x` in the window.
pub fn unit_eval(u: &ApproximateUnit, n: u64, x: &PointId, w: &Window) -> Result<Q> {
    if !w.contains(u.source.space(), x) {
        return Err(Error::domain(format!("{x} lies outside the window")));
    }
    u.eval(n, x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuReport {
    pub n_max: u64,
    /// `0 <= u_n <= 1`, `u_n = 1` exactly on `A_{2n}`, `u_n <= u_{n+1}`.
    pub range_ok: bool,
    /// `u_n(x) > 0 ⟹ u_{n+1}(x) = 1`.
    pub au1_support: bool,
    /// `u_n · u_{n+1} = u_n`, checked directly.
    pub au1_product: bool,
    /// `u_n(x) = 1`, `u_n(y) = 0` ⟹ `d_X(x, y) >= 1`.
    pub au2_relaxed: bool,
    /// Pairs `(n, x, y)` with `u_n(x) = 1`, `u_n(y) = 0` and `d_X(x, y) = 1`.
    pub strict_violations: Vec<(u64, PointId, PointId)>,
    pub strict_violation_count: usize,
    pub failures: Vec<String>,
}

impl AuReport {
    pub fn passed(&self) -> bool {
        self.range_ok && self.au1_support && self.au1_product && self.au2_relaxed
    }
}

const LISTED_VIOLATIONS: usize = 16;

/// (au1) exactly and (au2) in relaxed form, for `n = 1..=n_max` on every window point.
pub fn check_au(u: &ApproximateUnit, w: &Window, n_max: u64) -> Result<AuReport> {
    let s = u.source.space();
    let pts = window_points(s, w)?;
    let levels = u.source.tabulate(w)?.levels;
    let index: BTreeMap<PointId, usize> = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let vals = (1..=n_max + 1).map(|n| u.values(n, &pts)).collect::<Result<Vec<_>>>()?;
    let mut rep = AuReport {
        n_max,
        range_ok: true,
        au1_support: true,
        au1_product: true,
        au2_relaxed: true,
        strict_violations: Vec::new(),
        strict_violation_count: 0,
        failures: Vec::new(),
    };
    for n in 1..=n_max {
        let (un, next) = (&vals[(n - 1) as usize], &vals[n as usize]);
        for (i, x) in pts.iter().enumerate() {
            let v = un[i];
            if v < q(0) || v > q(1) || (v == q(1)) != (levels[i] <= 2 * n) || v > next[i] {
                rep.range_ok = false;
                rep.failures.push(format!("range/monotonicity at n={n}, x={x}"));
            }
            if v > q(0) && next[i] != q(1) {
                rep.au1_support = false;
                rep.failures.push(format!("(au1) support at n={n}, x={x}"));
            }
            if v * next[i] != v {
                rep.au1_product = false;
                rep.failures.push(format!("(au1) product at n={n}, x={x}"));
            }
            if v != q(1) {
                continue;
            }
            for y in s.ball(x, &q(1))? {
                let uy = match index.get(&y) {
                    Some(&j) => un[j],
                    None => u.eval(n, &y)?,
                };
                if uy != q(0) {
                    continue;
                }
                let d = s.dist(x, &y);
                if d < q(1) {
                    rep.au2_relaxed = false;
                    rep.failures.push(format!("(au2) at n={n}: d({x}, {y}) < 1"));
                } else {
                    rep.strict_violation_count += 1;
                    if rep.strict_violations.len() < LISTED_VIOLATIONS {
                        rep.strict_violations.push((n, *x, y));
                    }
                }
            }
        }
    }
    rep.failures.truncate(LISTED_VIOLATIONS);
    Ok(rep)
}

/// `w_n = u_n · v_n`.
pub fn unit_meet<'a>(u: &'a ApproximateUnit, v: &'a ApproximateUnit, n: u64) -> impl Fn(&PointId) -> Result<Q> + 'a {
    move |x| Ok(u.eval(n, x)? * v.eval(n, x)?)
}

/// `t_n = min(u_n + v_n, 1)`.
pub fn unit_join<'a>(u: &'a ApproximateUnit, v: &'a ApproximateUnit, n: u64) -> impl Fn(&PointId) -> Result<Q> + 'a {
    move |x| Ok((u.eval(n, x)? + v.eval(n, x)?).min(q(1)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelSetReport {
    pub n: u64,
    /// `{w_n = 1} = A_{2n} ∩ B_{2n}`.
    pub meet_ok: bool,
    /// `A_{2n} ∪ B_{2n} ⊆ {t_n = 1} ⊆ A_{2n+2} ∪ B_{2n+2}`.
    pub join_ok: bool,
    pub meet_ones: usize,
    pub join_ones: usize,
    pub failures: Vec<String>,
}

pub fn level_set_identities(u: &ApproximateUnit, v: &ApproximateUnit, n: u64, w: &Window) -> Result<LevelSetReport> {
    if u.source.space() != v.source.space() {
        return Err(Error::domain("units live on different spaces"));
    }
    let pts = window_points(u.source.space(), w)?;
    let (la, lb) = (u.source.tabulate(w)?.levels, v.source.tabulate(w)?.levels);
    let (wn, tn) = (unit_meet(u, v, n), unit_join(u, v, n));
    let vals = par::try_map(&pts, |x| Ok::<_, Error>((wn(x)?, tn(x)?)))?;
    let mut rep = LevelSetReport {
        n,
        meet_ok: true,
        join_ok: true,
        meet_ones: 0,
        join_ones: 0,
        failures: Vec::new(),
    };
    for (i, x) in pts.iter().enumerate() {
        let (wv, tv) = vals[i];
        let (a, b) = (la[i] <= 2 * n, lb[i] <= 2 * n);
        let (a2, b2) = (la[i] <= 2 * n + 2, lb[i] <= 2 * n + 2);
        rep.meet_ones += (wv == q(1)) as usize;
        rep.join_ones += (tv == q(1)) as usize;
        if (wv == q(1)) != (a && b) {
            rep.meet_ok = false;
            rep.failures.push(format!("w_{n}({x}) disagrees with A∩B"));
        }
        if ((a || b) && tv != q(1)) || (tv == q(1) && !(a2 || b2)) {
            rep.join_ok = false;
            rep.failures.push(format!("t_{n}({x}) breaks the sandwich"));
        }
    }
    rep.failures.truncate(LISTED_VIOLATIONS);
    Ok(rep)
}

/// `λ_U(x) = min{n : u_n(x) = 1}` on the window, found by doubling then bisection.
pub fn recovered_levels(u: &ApproximateUnit, w: &Window) -> Result<LevelTable> {
    let mut t = u.source.tabulate(w)?;
    let is_one = |n: u64, x: &PointId| -> Result<bool> { Ok(u.eval(n, x)? == q(1)) };
    t.levels = par::try_map(&t.points, |x| -> Result<u64> {
        let mut hi = 1u64;
        while !is_one(hi, x)? {
            hi = hi.checked_mul(2).ok_or_else(|| Error::domain("level overflow"))?;
        }
        let mut lo = hi / 2;
        // Invariant: u_lo(x) < 1 (or lo = 0), u_hi(x) = 1.
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if is_one(mid, x)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    })?;
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecoveryReport {
    pub source: String,
    /// `T(n)` from the source levels to the recovered ones, and back.
    pub forward: Vec<(u64, u64)>,
    pub backward: Vec<(u64, u64)>,
    /// Both transfers satisfy `T(n) <= 2n + 2`.
    pub bounded: bool,
}

pub fn level_recovery(u: &ApproximateUnit, w: &Window) -> Result<RecoveryReport> {
    let src = u.source.tabulate(w)?;
    let rec = recovered_levels(u, w)?;
    let (f, b) = (transfer_tables(&src, &rec), transfer_tables(&rec, &src));
    let ok = |t: &BTreeMap<u64, u64>| t.iter().all(|(n, v)| *v <= 2 * n + 2);
    Ok(RecoveryReport {
        source: u.source.name().to_string(),
        bounded: ok(&f.table) && ok(&b.table),
        forward: f.table.into_iter().collect(),
        backward: b.table.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;
    use crate::space::{CustomMetric, CustomSpace, MetricSpace, PointSet};

    fn squares(nat: &MetricSpace) -> LevelFunction {
        LevelFunction::from_subset(nat, PointSet::predicate("squares", |x| {
            let r = (x.x() as f64).sqrt() as i64;
            (r.saturating_sub(1)..=r + 1).any(|s| s * s == x.x())
        }))
    }

    #[test]
    fn unit_values() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 20);
        let u = ApproximateUnit::new(&squares(&nat));
        assert_eq!(unit_eval(&u, 1, &PointId::p1(7), &w).unwrap(), q(0));
        assert_eq!(unit_eval(&u, 1, &PointId::p1(8), &w).unwrap(), q(1));
        assert!(unit_eval(&u, 1, &PointId::p1(40), &w).is_err());
        let table = vec![
            vec![q(0), q(1), qr(3, 2)],
            vec![q(1), q(0), qr(1, 2)],
            vec![qr(3, 2), qr(1, 2), q(0)],
        ];
        let pts = vec![PointId::p1(0), PointId::p1(1), PointId::p1(2)];
        let sp = MetricSpace::Custom(std::sync::Arc::new(CustomSpace::new("half", pts, CustomMetric::Table(table), None).unwrap()));
        let u = ApproximateUnit::new(&LevelFunction::from_subset(&sp, PointSet::explicit("{0}", [PointId::p1(0)])));
        assert_eq!(u.eval(1, &PointId::p1(2)).unwrap(), qr(1, 2));
    }

    #[test]
    fn au_axioms() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 60);
        let rep = check_au(&ApproximateUnit::new(&squares(&nat)), &w, 6).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.strict_violations.iter().any(|(n, x, y)| *n == 1 && x.x() == 5 && y.x() == 6));
        let one = check_au(&ApproximateUnit::new(&LevelFunction::unit(&nat)), &w, 6).unwrap();
        assert!(one.passed() && one.strict_violation_count == 0);
    }

    #[test]
    fn meets_joins_and_recovery() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 64);
        let a = ApproximateUnit::new(&LevelFunction::from_subset(&nat, PointSet::predicate("4N", |x| x.x() % 4 == 0)));
        let b = ApproximateUnit::new(&LevelFunction::from_subset(&nat, PointSet::predicate("4N+2", |x| x.x() % 4 == 2)));
        for n in 1..=3 {
            let r = level_set_identities(&a, &b, n, &w).unwrap();
            assert!(r.meet_ok && r.join_ok, "{r:?}");
        }
        let r = level_set_identities(&a, &a, 1, &w).unwrap();
        assert!(r.meet_ok && r.join_ok);
        let rec = level_recovery(&a, &w).unwrap();
        assert!(rec.bounded, "{rec:?}");
        let z = ApproximateUnit::new(&LevelFunction::zero(&nat));
        assert!(level_recovery(&z, &w).unwrap().bounded);
    }
}
