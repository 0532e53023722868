//! Window-certified verdicts for equivalence, order and zero-ness of projections.
//!
//! Every claim is evaluated on the three concentric windows of radii `R/4`, `R/2`
//! and `R`. Level tables are computed once at `R` and filtered for the smaller radii.

use crate::error::{Error, Result};
use crate::projection::{LevelFunction, LevelTable};
use crate::rational::{q, ExactQ};
use crate::space::{PointId, Window};
use crate::verdict::{EscapePoint, Grid, Series, Status, Verdict, Witness};
use crate::{par, Q};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Default number of sublevel sets examined by the zero test.
pub const ZERO_N_MAX: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Quasi,
    Coarse,
}

/// `T(n) = max{λ₂(x) : λ₁(x) <= n}` over window points, for every realized `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransferFunction {
    pub table: BTreeMap<u64, u64>,
}

impl TransferFunction {
    /// `T` at an arbitrary `n`: the value at the largest realized level `<= n`.
    pub fn at(&self, n: u64) -> Option<u64> {
        self.table.range(..=n).next_back().map(|(_, v)| *v)
    }

    pub fn fits(&self, alpha: u64, beta: u64) -> bool {
        self.table.iter().all(|(n, t)| *t <= beta * n + alpha)
    }

    pub fn series(&self, name: impl Into<String>) -> Series {
        let mut s = Series::new(name);
        for (n, t) in &self.table {
            s.push_int(*n as i64, *t as i64);
        }
        s
    }
}

/// Transfer between two tables over the same points.
pub fn transfer_tables(t1: &LevelTable, t2: &LevelTable) -> TransferFunction {
    debug_assert_eq!(t1.points, t2.points);
    let mut pairs: Vec<(u64, u64)> = t1.levels.iter().copied().zip(t2.levels.iter().copied()).collect();
    pairs.sort_unstable();
    let mut table = BTreeMap::new();
    let mut run = 0;
    for (a, b) in pairs {
        run = run.max(b);
        table.insert(a, run);
    }
    TransferFunction { table }
}

pub fn transfer(e1: &LevelFunction, e2: &LevelFunction, w: &Window) -> Result<TransferFunction> {
    if e1.space() != e2.space() {
        return Err(Error::domain("transfer between different spaces"));
    }
    Ok(transfer_tables(&e1.tabulate(w)?, &e2.tabulate(w)?))
}

/// `[R/4, R/2, R]`.
pub fn sweep_radii(w: &Window) -> [Q; 3] {
    [w.radius / q(4), w.radius / q(2), w.radius]
}

fn minimal_affine(grid: &Grid, fits: impl Fn(u64, u64) -> bool) -> Option<(u64, u64)> {
    grid.pairs().find(|&(a, b)| fits(a, b))
}

/// Quasi or coarse equivalence of two expanding sequences.
pub fn equivalent(e1: &LevelFunction, e2: &LevelFunction, mode: Mode, w: &Window, grid: &Grid) -> Result<Verdict> {
    if e1.space() != e2.space() {
        return Err(Error::domain("equivalence between different spaces"));
    }
    let (full1, full2) = (e1.tabulate(w)?, e2.tabulate(w)?);
    let radii = sweep_radii(w);
    let tables: Vec<(TransferFunction, TransferFunction, LevelTable, LevelTable)> = radii
        .iter()
        .map(|r| {
            let (a, b) = (full1.restrict(r), full2.restrict(r));
            (transfer_tables(&a, &b), transfer_tables(&b, &a), a, b)
        })
        .collect();
    let witnesses: Vec<Option<(u64, u64)>> = tables
        .iter()
        .map(|(t12, t21, _, _)| minimal_affine(grid, |a, b| t12.fits(a, b) && t21.fits(a, b)))
        .collect();
    let (t12, t21, _, _) = &tables[2];
    let series = [t12.series("T12"), t21.series("T21")];
    let mut beta_series = Series::new("minimal (α,β) per radius: β");
    for (r, wit) in radii.iter().zip(&witnesses) {
        beta_series.push(*r, q(wit.map_or(-1, |(_, b)| b as i64)));
    }
    let quasi = match witnesses[0] {
        Some(wt) if witnesses.iter().all(|x| *x == Some(wt)) => Some(wt),
        _ => None,
    };
    let tag = match mode {
        Mode::Quasi => "quasi",
        Mode::Coarse => "coarse",
    };
    let claim = format!("{} ~{tag} {}", e1.name(), e2.name());
    let mut v = match mode {
        Mode::Quasi => match quasi {
            Some((alpha, beta)) => Verdict::certified(claim, "quasi-equivalent", Witness::Affine { alpha, beta }, w),
            None => {
                let note = if witnesses.iter().all(|x| x.is_some()) {
                    "minimal affine witness changes across the sweep"
                } else {
                    "no affine witness in the grid"
                };
                Verdict::inconclusive(claim, "no-stable-affine-witness", w).with_note(note)
            }
        },
        Mode::Coarse => {
            let stable = quasi.is_some() || {
                let (mid, top) = (&tables[1], &tables[2]);
                tables[0].2.realized().iter().all(|&n| mid.0.at(n) == top.0.at(n))
                    && tables[0].3.realized().iter().all(|&n| mid.1.at(n) == top.1.at(n))
            };
            if stable {
                let domain: BTreeSet<u64> = full1.realized().union(&full2.realized()).copied().collect();
                let mut run = 0;
                let table = domain
                    .iter()
                    .map(|&n| {
                        run = run.max(t12.at(n).unwrap_or(0)).max(t21.at(n).unwrap_or(0));
                        (n, run)
                    })
                    .collect();
                Verdict::certified(claim, "coarse-equivalent", Witness::Tabulated { table }, w)
            } else {
                Verdict::inconclusive(claim, "transfer-not-stable", w)
            }
        }
    };
    v.diagnostics.series.extend(series);
    v.diagnostics.series.push(beta_series);
    Ok(v)
}

/// `s_n = max{d_X(x, x₀) : λ(x) <= n}` on a table, `None` for empty sublevel sets.
fn spreads(t: &LevelTable, n_max: u64) -> Vec<Option<Q>> {
    let mut s = vec![None; n_max as usize];
    for (l, d) in t.levels.iter().zip(&t.base_dist) {
        for slot in s.iter_mut().skip((*l as usize).max(1) - 1) {
            if slot.is_none_or(|v: Q| *d > v) {
                *slot = Some(*d);
            }
        }
    }
    s
}

/// Zero test: every `A_n`, `n <= n_max`, is bounded on the sweep.
pub fn is_zero(e: &LevelFunction, mode: Mode, w: &Window, n_max: u64) -> Result<Verdict> {
    let full = e.tabulate(w)?;
    let radii = sweep_radii(w);
    let s: Vec<Vec<Option<Q>>> = radii.iter().map(|r| spreads(&full.restrict(r), n_max)).collect();
    let claim = format!("{} = 0", e.name());
    let mut series = Vec::new();
    for (r, sr) in radii.iter().zip(&s) {
        let mut ser = Series::new(format!("s_n at R={}", crate::rational::format_q(r)));
        for (i, v) in sr.iter().enumerate() {
            if let Some(v) = v {
                ser.push(q(i as i64 + 1), *v);
            }
        }
        series.push(ser);
    }
    let stable = s[0] == s[1] && s[1] == s[2];
    let nonempty = s[0].iter().any(|v| v.is_some());
    let escaping = (0..n_max as usize).find(|&i| match (s[0][i], s[1][i], s[2][i]) {
        (Some(a), Some(b), Some(c)) => a <= b && b <= c && a < c,
        _ => false,
    });
    let mut v = if stable && nonempty {
        let bounds: Vec<(u64, ExactQ)> = s[2]
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i as u64 + 1, v.into())))
            .collect();
        let affine = minimal_affine(&Grid::default(), |a, b| {
            bounds.iter().all(|(n, sn)| sn.0 <= q((b * n + a) as i64))
        });
        match (mode, affine) {
            (Mode::Quasi, None) => Verdict::inconclusive(claim, "bounded-without-affine-envelope", w),
            _ => Verdict::certified(claim, "zero", Witness::ZeroBound { bounds, affine }, w),
        }
    } else if let Some(i) = escaping {
        Verdict::inconclusive(claim, "not-zero-evidence", w).with_note(format!("A_{} escapes every ball of the sweep", i + 1))
    } else if !nonempty {
        Verdict::inconclusive(claim, "empty-sublevels", w).with_note(format!("all A_n with n <= {n_max} are empty"))
    } else {
        Verdict::inconclusive(claim, "unstable", w)
    };
    v.diagnostics.series.extend(series);
    Ok(v)
}

/// Escape evidence: some `n <= n_max` whose transfer `T_{1→2}(n)` never decreases across
/// the sweep and ends strictly above its value at `R/4`. The witness lists a realizing point for each radius.
pub fn escape(e1: &LevelFunction, e2: &LevelFunction, w: &Window, n_max: u64) -> Result<Option<Witness>> {
    let (full1, full2) = (e1.tabulate(w)?, e2.tabulate(w)?);
    let radii = sweep_radii(w);
    for n in 1..=n_max {
        let mut pts: Vec<EscapePoint> = Vec::new();
        for r in &radii {
            let best = (0..full1.len())
                .filter(|&i| full1.base_dist[i] <= *r && full1.levels[i] <= n)
                .max_by_key(|&i| (full2.levels[i], std::cmp::Reverse(i)));
            match best {
                Some(i) => pts.push(EscapePoint {
                    radius: (*r).into(),
                    point: full1.points[i],
                    level: full2.levels[i],
                }),
                None => break,
            }
        }
        if pts.len() == 3 && pts.windows(2).all(|p| p[0].level <= p[1].level) && pts[0].level < pts[2].level {
            return Ok(Some(Witness::Escape { n, points: pts }));
        }
    }
    Ok(None)
}

/// One-sided order `e1 ⪯ e2` (every `A⁽¹⁾_n` lies in some `A⁽²⁾_m`), coarse form.
pub fn precedes(e1: &LevelFunction, e2: &LevelFunction, w: &Window) -> Result<Verdict> {
    let (full1, full2) = (e1.tabulate(w)?, e2.tabulate(w)?);
    let radii = sweep_radii(w);
    let ts: Vec<TransferFunction> = radii
        .iter()
        .map(|r| transfer_tables(&full1.restrict(r), &full2.restrict(r)))
        .collect();
    let small = full1.restrict(&radii[0]).realized();
    let claim = format!("{} ⪯ {}", e1.name(), e2.name());
    let stable = small.iter().all(|&n| ts[1].at(n) == ts[2].at(n));
    let mut v = if stable {
        let table = ts[2].table.iter().map(|(a, b)| (*a, *b)).collect();
        Verdict::certified(claim, "precedes", Witness::Tabulated { table }, w)
    } else if let Some(wit) = escape(e1, e2, w, crate::asymptotics::ZERO_N_MAX)? {
        let mut v = Verdict::new(claim, Status::Inconclusive, "escape-evidence", w);
        v.witness = Some(wit);
        v
    } else {
        Verdict::inconclusive(claim, "transfer-not-stable", w)
    };
    v.diagnostics.series.push(ts[2].series("T12"));
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    /// Certified at every radius with the same witness.
    Stable,
    /// Certified at every radius, witnesses differ.
    Varying,
    /// Not certified at first, certified from some radius on.
    Strengthens,
    /// Certified at first, not certified later.
    Degrades,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub radii: Vec<ExactQ>,
    pub verdicts: Vec<Verdict>,
    pub trend: Trend,
    /// The verdict at the largest radius, annotated with the trend.
    #[serde(rename = "final")]
    pub last: Verdict,
}

/// Runs `claim` on windows of increasing radius around `base`.
pub fn sweep<F>(radii: &[Q], base: PointId, claim: F) -> Result<SweepReport>
where
    F: Fn(&Window) -> Result<Verdict> + Sync + Send,
{
    if radii.len() < 3 || radii.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::domain("a sweep needs at least three strictly increasing radii"));
    }
    let windows: Vec<Window> = radii.iter().map(|r| Window::new(*r, base)).collect();
    let verdicts = par::try_map(&windows, |w| claim(w))?;
    let cert: Vec<bool> = verdicts.iter().map(|v| v.is_certified()).collect();
    let trend = if cert.iter().all(|c| *c) {
        if verdicts.iter().all(|v| v.witness == verdicts[0].witness) {
            Trend::Stable
        } else {
            Trend::Varying
        }
    } else if cert.windows(2).all(|p| p[0] <= p[1]) && *cert.last().unwrap() {
        Trend::Strengthens
    } else if cert.windows(2).all(|p| p[0] >= p[1]) && cert[0] {
        Trend::Degrades
    } else {
        Trend::Mixed
    };
    let mut last = verdicts.last().unwrap().clone();
    last.diagnostics.trend = Some(serde_json::to_value(trend)?.as_str().unwrap_or_default().to_string());
    Ok(SweepReport {
        radii: radii.iter().map(|r| (*r).into()).collect(),
        verdicts,
        trend,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double::DoubleMetric;
    use crate::expr::Expr;
    use crate::projection::meet;
    use crate::space::{MetricSpace, PointSet};

    fn p(x: i64) -> PointId {
        PointId::p1(x)
    }

    #[test]
    fn transfers() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 40);
        let ev = LevelFunction::from_subset(&nat, PointSet::predicate("evens", |x| x.x() % 2 == 0));
        let od = LevelFunction::from_subset(&nat, PointSet::predicate("odds", |x| x.x() % 2 == 1));
        let t = transfer(&ev, &od, &w).unwrap();
        assert_eq!(t.at(1), Some(2));
        assert!(t.table.iter().filter(|(n, _)| **n >= 2).all(|(n, v)| n == v));
        let t = transfer(&ev, &ev, &w).unwrap();
        assert!(t.table.iter().all(|(n, v)| n == v));
        let z = LevelFunction::from_subset(&nat, PointSet::explicit("{0}", [p(0)]));
        let t = transfer(&z, &LevelFunction::unit(&nat), &w).unwrap();
        assert!(t.table.values().all(|v| *v == 1));
    }

    #[test]
    fn equivalences() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 64);
        let g = Grid::default();
        let e = LevelFunction::from_subset(&nat, PointSet::predicate("evens", |x| x.x() % 2 == 0));
        let v = equivalent(&e, &e, Mode::Quasi, &w, &g).unwrap();
        assert_eq!(v.witness, Some(Witness::Affine { alpha: 0, beta: 1 }));
        let a = LevelFunction::from_metric(&DoubleMetric::zero_at(&nat, p(0)).unwrap());
        let b = LevelFunction::from_subset(&nat, PointSet::explicit("{0}", [p(0)]));
        let v = equivalent(&a, &b, Mode::Quasi, &w, &g).unwrap();
        assert_eq!(v.witness, Some(Witness::Affine { alpha: 1, beta: 1 }));
        assert!(equivalent(&b, &a, Mode::Coarse, &w, &g).unwrap().is_certified());
    }

    #[test]
    fn power_law_pair() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 1024);
        let a = LevelFunction::from_expr(&nat, Expr::parse("ceilroot(x + 1, 2)").unwrap());
        let b = LevelFunction::from_expr(&nat, Expr::parse("ceilroot(x + 1, 3)").unwrap());
        let g = Grid::default();
        let qv = equivalent(&a, &b, Mode::Quasi, &w, &g).unwrap();
        assert_eq!(qv.status, Status::Inconclusive);
        let cv = equivalent(&a, &b, Mode::Coarse, &w, &g).unwrap();
        assert_eq!(cv.status, Status::CertifiedOnWindow);
    }

    #[test]
    fn zero_tests() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 128);
        let z = LevelFunction::from_metric(&DoubleMetric::zero_at(&nat, p(0)).unwrap());
        let v = is_zero(&z, Mode::Quasi, &w, ZERO_N_MAX).unwrap();
        assert!(v.is_certified());
        match v.witness {
            Some(Witness::ZeroBound { affine, .. }) => assert_eq!(affine, Some((0, 1))),
            other => panic!("{other:?}"),
        }
        let u = is_zero(&LevelFunction::unit(&nat), Mode::Coarse, &w, ZERO_N_MAX).unwrap();
        assert_eq!(u.label, "not-zero-evidence");

        let geom = MetricSpace::GeomLine;
        let a = LevelFunction::from_subset(&geom, PointSet::predicate("4^k", |x| x.x().trailing_zeros() % 2 == 0));
        let d = LevelFunction::from_subset(&geom, PointSet::predicate("2*4^k", |x| x.x().trailing_zeros() % 2 == 1));
        let m = meet(&a, &d).unwrap();
        let v = is_zero(&m, Mode::Coarse, &Window::around(&geom, 1024), 10).unwrap();
        assert!(v.is_certified(), "{v:?}");
    }

    #[test]
    fn sweeps() {
        let nat = MetricSpace::NatLine;
        let e = LevelFunction::from_subset(&nat, PointSet::predicate("evens", |x| x.x() % 2 == 0));
        let g = Grid::default();
        let r = sweep(&[q(8), q(16), q(32)], p(0), |w| equivalent(&e, &e, Mode::Quasi, w, &g)).unwrap();
        assert_eq!(r.trend, Trend::Stable);
        assert!(sweep(&[q(8), q(16)], p(0), |w| equivalent(&e, &e, Mode::Quasi, w, &g)).is_err());
    }
}
