//! Independent re-checks of witnesses by direct substitution.
//!
//! These functions do not reuse tables, transfer functions or pruned searches: levels
//! are recomputed point by point and kernel values come from unpruned minimisation.

use crate::double::DoubleMetric;
use crate::error::Result;
use crate::projection::LevelFunction;
use crate::rational::{format_q, q};
use crate::space::{window_points, PointId, Window};
use crate::verdict::Witness;
use crate::Q;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recheck {
    pub ok: bool,
    pub checked: usize,
    pub failure: Option<String>,
}

impl Recheck {
    fn pass(checked: usize) -> Self {
        Recheck {
            ok: true,
            checked,
            failure: None,
        }
    }

    fn fail(checked: usize, why: String) -> Self {
        Recheck {
            ok: false,
            checked,
            failure: Some(why),
        }
    }
}

fn levels(e: &LevelFunction, pts: &[PointId]) -> Result<Vec<u64>> {
    pts.iter().map(|x| e.level(x)).collect()
}

fn wrong_kind(w: &Witness) -> Recheck {
    Recheck::fail(0, format!("witness kind {w:?} does not apply"))
}

/// Affine: `λ₂ <= βλ₁ + α` and `λ₁ <= βλ₂ + α`. Tabulated: `λ₂ <= φ(λ₁)` and `λ₁ <= φ(λ₂)`.
pub fn equivalence(e1: &LevelFunction, e2: &LevelFunction, witness: &Witness, w: &Window) -> Result<Recheck> {
    let pts = window_points(e1.space(), w)?;
    let (l1, l2) = (levels(e1, &pts)?, levels(e2, &pts)?);
    let bound: Box<dyn Fn(u64) -> Option<u64>> = match witness {
        Witness::Affine { alpha, beta } => Box::new(move |n| Some(beta * n + alpha)),
        Witness::Tabulated { table } => Box::new(move |n| Witness::tabulated_at(table, n)),
        other => return Ok(wrong_kind(other)),
    };
    for (i, x) in pts.iter().enumerate() {
        for (a, b) in [(l1[i], l2[i]), (l2[i], l1[i])] {
            if bound(a).is_none_or(|v| b > v) {
                return Ok(Recheck::fail(i, format!("at {x}: level {b} exceeds the bound at {a}")));
            }
        }
    }
    Ok(Recheck::pass(pts.len()))
}

/// Every point with `λ(x) <= n` lies within `bound(n)` of the basepoint, and the bounds
/// respect the affine envelope when one is given.
pub fn zero(e: &LevelFunction, witness: &Witness, w: &Window) -> Result<Recheck> {
    let Witness::ZeroBound { bounds, affine } = witness else {
        return Ok(wrong_kind(witness));
    };
    let s = e.space();
    let pts = window_points(s, w)?;
    let l = levels(e, &pts)?;
    for (n, b) in bounds {
        if let Some((alpha, beta)) = affine {
            if b.0 > q((beta * n + alpha) as i64) {
                return Ok(Recheck::fail(0, format!("bound {} at n={n} exceeds the affine envelope", format_q(&b.0))));
            }
        }
        for (x, lx) in pts.iter().zip(&l) {
            if lx <= n && s.distance(x, &w.basepoint)? > b.0 {
                return Ok(Recheck::fail(0, format!("{x} has level {lx} <= {n} but lies beyond {}", format_q(&b.0))));
            }
        }
    }
    Ok(Recheck::pass(pts.len()))
}

/// For each `(m, k)`: every window point of level `<= m` has a point of level `<= core`
/// within distance `k`, searched by scanning coordinates directly.
pub fn type_one(e: &LevelFunction, witness: &Witness, w: &Window) -> Result<Recheck> {
    let Witness::TypeI { core, k_table } = witness else {
        return Ok(wrong_kind(witness));
    };
    let s = e.space();
    let pts = window_points(s, w)?;
    let l = levels(e, &pts)?;
    let mut checked = 0;
    for (x, lx) in pts.iter().zip(&l) {
        let Some(&(_, k)) = k_table.iter().find(|(m, _)| m >= lx) else {
            continue;
        };
        let found = s
            .ball(x, &q(k as i64))?
            .into_iter()
            .try_fold(false, |hit, y| -> Result<bool> { Ok(hit || e.level(&y)? <= *core) })?;
        if !found {
            return Ok(Recheck::fail(checked, format!("{x} (level {lx}) has no level-{core} point within {k}")));
        }
        checked += 1;
    }
    Ok(Recheck::pass(checked))
}

/// Each listed point lies in its window, has `λ₁ <= n` and the stated `λ₂`, and the
/// `λ₂` values never decrease and end above where they start.
pub fn escape(e1: &LevelFunction, e2: &LevelFunction, witness: &Witness) -> Result<Recheck> {
    let Witness::Escape { n, points } = witness else {
        return Ok(wrong_kind(witness));
    };
    let s = e1.space();
    let base = s.basepoint();
    for (i, p) in points.iter().enumerate() {
        if s.distance(&p.point, &base)? > p.radius.0 {
            return Ok(Recheck::fail(i, format!("{} lies outside radius {}", p.point, format_q(&p.radius.0))));
        }
        if e1.level(&p.point)? > *n || e2.level(&p.point)? != p.level {
            return Ok(Recheck::fail(i, format!("levels at {} do not match the witness", p.point)));
        }
    }
    let grows = points.windows(2).all(|p| p[0].level <= p[1].level) && points.first().map(|p| p.level) < points.last().map(|p| p.level);
    if !grows {
        return Ok(Recheck::fail(points.len(), "levels do not grow".into()));
    }
    Ok(Recheck::pass(points.len()))
}

/// `d(x, x′) <= β·(d(x, X′) + α)` with both sides minimised over the whole window.
pub fn projection(d: &DoubleMetric, witness: &Witness, w: &Window) -> Result<Recheck> {
    let Witness::Affine { alpha, beta } = witness else {
        return Ok(wrong_kind(witness));
    };
    let (pts, m) = d.brute_force_matrix(w)?;
    for (i, x) in pts.iter().enumerate() {
        let f = m[i][i];
        let g: Q = *m[i].iter().min().expect("window contains its basepoint");
        if f > q(*beta as i64) * (g + q(*alpha as i64)) {
            return Ok(Recheck::fail(0, format!("at {x}: d(x,x')={} but d(x,X')={}", format_q(&f), format_q(&g))));
        }
    }
    Ok(Recheck::pass(pts.len()))
}
