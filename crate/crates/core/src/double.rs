//! Metrics on the double `X ⊔ X′`, presented by their cross-copy kernel `(x, y) ↦ d(x, y′)`.
//!
//! Infima over `X` are turned into finite searches by each kernel's [`Bound`]: a
//! coercive kernel satisfies `d(x, y′) >= d_X(x, y) + c`, so once a candidate value
//! `v` is known only points in a ball of radius `v - c` can improve it.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::projection::LevelFunction;
use crate::rational::{format_q, q};
use crate::space::{certified_dist_to_set, DEFAULT_SEARCH_CAP as DEFAULT_CAP, dist_to_set, window_points, Certified, MetricSpace, PointId, PointSet, Window};
use crate::{par, Q};
use num_traits::Signed;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// `δ: X → [1, ∞)`.
#[derive(Clone)]
pub enum DeltaFn {
    Const(Q),
    /// `δ(u) = max(λ(u), 1)`.
    Levels(LevelFunction),
    Expr(Expr),
    /// Explicit values with a default for all other points.
    Table { values: Arc<BTreeMap<PointId, Q>>, default: Q },
}

impl DeltaFn {
    pub fn eval(&self, space: &MetricSpace, u: &PointId) -> Result<Q> {
        let v = match self {
            DeltaFn::Const(c) => *c,
            DeltaFn::Levels(l) => q(l.level(u)?.max(1) as i64),
            DeltaFn::Expr(e) => e.eval(space, u)?,
            DeltaFn::Table { values, default } => *values.get(u).unwrap_or(default),
        };
        if v < q(1) {
            return Err(Error::domain(format!("δ({u}) = {} is below 1", format_q(&v))));
        }
        Ok(v)
    }

    /// A certified lower bound for `δ`.
    pub fn floor(&self) -> Q {
        match self {
            DeltaFn::Const(c) => *c,
            DeltaFn::Table { values, default } => values.values().copied().chain([*default]).min().unwrap().max(q(1)),
            _ => q(1),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            DeltaFn::Const(c) => format_q(c),
            DeltaFn::Levels(l) => format!("δ[{}]", l.name()),
            DeltaFn::Expr(e) => e.to_string(),
            DeltaFn::Table { values, .. } => format!("table[{}]", values.len()),
        }
    }
}

/// `d(x, y′) >= d_X(x, y) + coercive` (when present) and `d(x, y′) >= floor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    pub coercive: Option<Q>,
    pub floor: Q,
}

pub type ClosedFn = dyn Fn(&MetricSpace, &PointId, &PointId) -> Result<Q> + Send + Sync;

#[derive(Clone)]
pub enum Kernel {
    Delta(DeltaFn),
    ZeroAt(PointId),
    /// `b_A(x, y′) = d_X(x, A) + 1 + d_X(y, A)`.
    Subset(PointSet),
    Closed { f: Arc<ClosedFn>, bound: Bound },
    /// `(ρ ∘ d)(x, z′) = inf_y [d(x, y′) + ρ(y, z′)]`, stored as `(d, ρ)`.
    Compose(DoubleMetric, DoubleMetric),
    Adjoint(DoubleMetric),
    Max(DoubleMetric, DoubleMetric),
    /// `inf_u [d_X(x, u) + min(d1(u, u′), d2(u, u′)) + d_X(u, y)]`.
    MinGlue(DoubleMetric, DoubleMetric),
}

#[derive(Clone)]
pub struct DoubleMetric {
    space: MetricSpace,
    kernel: Arc<Kernel>,
    name: String,
}

impl fmt::Debug for DoubleMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleMetric({})", self.name)
    }
}

/// Where infima may look: the window only, or the whole space.
#[derive(Debug, Clone, Copy)]
pub enum Scope<'a> {
    Window(&'a Window),
    Free,
}

fn merge(exact: &mut bool, req: &mut Option<Q>, other_exact: bool, other_req: Option<Q>) {
    let unbounded = (!*exact && req.is_none()) || (!other_exact && other_req.is_none());
    *exact &= other_exact;
    *req = if unbounded {
        None
    } else {
        match (*req, other_req) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    };
}

struct Acc {
    best: Q,
    exact: bool,
    req: Option<Q>,
}

impl Acc {
    fn new(best: Q) -> Self {
        Acc {
            best,
            exact: true,
            req: None,
        }
    }

    fn absorb<T>(&mut self, c: &Certified<T>) {
        merge(&mut self.exact, &mut self.req, c.exact, c.required_radius);
    }

    fn offer(&mut self, v: Q) {
        if v < self.best {
            self.best = v;
        }
    }

    fn done(self) -> Certified<Q> {
        Certified {
            value: self.best,
            exact: self.exact,
            required_radius: self.req,
        }
    }
}

impl DoubleMetric {
    fn make(space: &MetricSpace, kernel: Kernel, name: String) -> Self {
        DoubleMetric {
            space: space.clone(),
            kernel: Arc::new(kernel),
            name,
        }
    }

    pub fn delta(space: &MetricSpace, delta: DeltaFn) -> Self {
        let name = format!("d_δ[{}]", delta.describe());
        Self::make(space, Kernel::Delta(delta), name)
    }

    pub fn zero_at(space: &MetricSpace, x0: PointId) -> Result<Self> {
        if !space.contains(&x0) {
            return Err(Error::domain(format!("{x0} is not a point of {}", space.name())));
        }
        Ok(Self::make(space, Kernel::ZeroAt(x0), format!("d_{x0}")))
    }

    /// The literal `b_A` kernel; `A` must have a point within the default search cap.
    pub fn subset(space: &MetricSpace, a: PointSet) -> Result<Self> {
        certified_dist_to_set(space, &space.basepoint(), &a, &q(DEFAULT_CAP))?;
        let name = format!("b_{}", a.name());
        Ok(Self::make(space, Kernel::Subset(a), name))
    }

    /// Closed-form kernel; the claimed bound is spot-checked on the window of radius 16.
    pub fn closed(
        space: &MetricSpace,
        name: impl Into<String>,
        bound: Bound,
        f: impl Fn(&MetricSpace, &PointId, &PointId) -> Result<Q> + Send + Sync + 'static,
    ) -> Result<Self> {
        let d = Self::closed_unchecked(space, name, bound, f);
        let pts = window_points(space, &Window::around(space, 16))?;
        for x in &pts {
            for y in &pts {
                let v = d.eval(x, y, Scope::Free)?.value;
                let dxy = space.distance(x, y)?;
                if v < bound.floor || bound.coercive.is_some_and(|c| v < dxy + c) {
                    return Err(Error::domain(format!("{}: claimed lower bound fails at ({x}, {y})", d.name)));
                }
            }
        }
        Ok(d)
    }

    /// Closed-form kernel taken on trust; used for hand-built counterexamples.
    pub fn closed_unchecked(
        space: &MetricSpace,
        name: impl Into<String>,
        bound: Bound,
        f: impl Fn(&MetricSpace, &PointId, &PointId) -> Result<Q> + Send + Sync + 'static,
    ) -> Self {
        Self::make(space, Kernel::Closed { f: Arc::new(f), bound }, name.into())
    }

    /// `ρ ∘ d`.
    pub fn compose(d: &DoubleMetric, rho: &DoubleMetric) -> Result<Self> {
        same_space(d, rho)?;
        let name = format!("({}∘{})", rho.name, d.name);
        Ok(Self::make(&d.space, Kernel::Compose(d.clone(), rho.clone()), name))
    }

    pub fn adjoint(&self) -> Self {
        if let Kernel::Adjoint(inner) = &*self.kernel {
            return inner.clone();
        }
        Self::make(&self.space, Kernel::Adjoint(self.clone()), format!("{}*", self.name))
    }

    pub fn pointwise_max(d1: &DoubleMetric, d2: &DoubleMetric) -> Result<Self> {
        same_space(d1, d2)?;
        let name = format!("max({},{})", d1.name, d2.name);
        Ok(Self::make(&d1.space, Kernel::Max(d1.clone(), d2.clone()), name))
    }

    pub fn min_glue(d1: &DoubleMetric, d2: &DoubleMetric) -> Result<Self> {
        same_space(d1, d2)?;
        let name = format!("glue({},{})", d1.name, d2.name);
        Ok(Self::make(&d1.space, Kernel::MinGlue(d1.clone(), d2.clone()), name))
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

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn bound(&self) -> Bound {
        match &*self.kernel {
            Kernel::Delta(delta) => {
                let c = delta.floor();
                Bound {
                    coercive: Some(c),
                    floor: c,
                }
            }
            Kernel::ZeroAt(_) => Bound {
                coercive: Some(q(1)),
                floor: q(1),
            },
            Kernel::Subset(_) => Bound {
                coercive: None,
                floor: q(1),
            },
            Kernel::Closed { bound, .. } => *bound,
            Kernel::Compose(d, rho) => {
                let (a, b) = (d.bound(), rho.bound());
                Bound {
                    coercive: a.coercive.zip(b.coercive).map(|(x, y)| x + y),
                    floor: a.floor + b.floor,
                }
            }
            Kernel::Adjoint(d) => d.bound(),
            Kernel::Max(d1, d2) => {
                let (a, b) = (d1.bound(), d2.bound());
                Bound {
                    coercive: match (a.coercive, b.coercive) {
                        (Some(x), Some(y)) => Some(x.max(y)),
                        (x, y) => x.or(y),
                    },
                    floor: a.floor.max(b.floor),
                }
            }
            Kernel::MinGlue(d1, d2) => {
                let c = d1.bound().floor.min(d2.bound().floor);
                Bound {
                    coercive: Some(c),
                    floor: c,
                }
            }
        }
    }

    /// Points of `scope` within `r` of `center`, plus whether the ball was fully searched.
    fn candidates(&self, center: &PointId, r: &Q, scope: Scope) -> Result<(Vec<PointId>, Certified<()>)> {
        if r.is_negative() {
            return Ok((Vec::new(), Certified::exact(())));
        }
        match scope {
            Scope::Free => Ok((self.space.ball(center, r)?, Certified::exact(()))),
            Scope::Window(w) => {
                let need = self.space.distance(&w.basepoint, center)? + r;
                if need <= w.radius {
                    let pts = self.space.ball(center, r)?;
                    return Ok((
                        pts,
                        Certified {
                            value: (),
                            exact: true,
                            required_radius: Some(need),
                        },
                    ));
                }
                let pts = window_points(&self.space, w)?
                    .into_iter()
                    .filter(|u| self.space.dist(center, u) <= *r)
                    .collect();
                Ok((
                    pts,
                    Certified {
                        value: (),
                        exact: false,
                        required_radius: Some(need),
                    },
                ))
            }
        }
    }

    fn set_distance(&self, x: &PointId, a: &PointSet, scope: Scope) -> Result<Certified<Q>> {
        match scope {
            Scope::Free => Ok(Certified::exact(certified_dist_to_set(&self.space, x, a, &q(DEFAULT_CAP))?)),
            Scope::Window(w) => dist_to_set(&self.space, x, a, w),
        }
    }

    /// `d(x, y′)`.
    pub fn eval(&self, x: &PointId, y: &PointId, scope: Scope) -> Result<Certified<Q>> {
        let s = &self.space;
        match &*self.kernel {
            Kernel::Delta(delta) => {
                let dxy = s.distance(x, y)?;
                let mut acc = Acc::new(delta.eval(s, x)? + dxy);
                let floor = delta.floor();
                let (cands, cert) = self.candidates(x, &(acc.best - floor), scope)?;
                acc.absorb(&cert);
                for u in &cands {
                    let path = s.dist(x, u) + s.dist(u, y);
                    if path + floor < acc.best {
                        acc.offer(path + delta.eval(s, u)?);
                    }
                }
                Ok(acc.done())
            }
            Kernel::ZeroAt(x0) => Ok(Certified::exact(s.distance(x, x0)? + q(1) + s.distance(x0, y)?)),
            Kernel::Subset(a) => {
                let (dx, dy) = (self.set_distance(x, a, scope)?, self.set_distance(y, a, scope)?);
                let mut acc = Acc::new(dx.value + q(1) + dy.value);
                acc.absorb(&dx);
                acc.absorb(&dy);
                Ok(acc.done())
            }
            Kernel::Closed { f, .. } => {
                s.distance(x, y)?;
                Ok(Certified::exact(f(s, x, y)?))
            }
            Kernel::Adjoint(d) => d.eval(y, x, scope),
            Kernel::Max(d1, d2) => {
                let (a, b) = (d1.eval(x, y, scope)?, d2.eval(x, y, scope)?);
                let mut acc = Acc::new(a.value.max(b.value));
                acc.absorb(&a);
                acc.absorb(&b);
                Ok(acc.done())
            }
            Kernel::MinGlue(d1, d2) => {
                let floor = self.bound().floor;
                let m = |u: &PointId| -> Result<Certified<Q>> {
                    let (a, b) = (d1.eval(u, u, scope)?, d2.eval(u, u, scope)?);
                    let mut acc = Acc::new(a.value.min(b.value));
                    acc.absorb(&a);
                    acc.absorb(&b);
                    Ok(acc.done())
                };
                let mx = m(x)?;
                let mut acc = Acc::new(mx.value + s.distance(x, y)?);
                acc.absorb(&mx);
                let (cands, cert) = self.candidates(x, &(acc.best - floor), scope)?;
                acc.absorb(&cert);
                for u in &cands {
                    let path = s.dist(x, u) + s.dist(u, y);
                    if path + floor < acc.best {
                        let mu = m(u)?;
                        acc.absorb(&mu);
                        acc.offer(path + mu.value);
                    }
                }
                Ok(acc.done())
            }
            Kernel::Compose(d, rho) => self.eval_compose(d, rho, x, y, scope),
        }
    }

    fn eval_compose(
        &self,
        d: &DoubleMetric,
        rho: &DoubleMetric,
        x: &PointId,
        z: &PointId,
        scope: Scope,
    ) -> Result<Certified<Q>> {
        let s = &self.space;
        let (bd, br) = (d.bound(), rho.bound());
        let term = |y: &PointId| -> Result<Certified<Q>> {
            let (a, b) = (d.eval(x, y, scope)?, rho.eval(y, z, scope)?);
            let mut acc = Acc::new(a.value + b.value);
            acc.absorb(&a);
            acc.absorb(&b);
            Ok(acc.done())
        };
        let tx = term(x)?;
        let mut acc = Acc::new(tx.value);
        acc.absorb(&tx);
        if x != z {
            let tz = term(z)?;
            acc.absorb(&tz);
            acc.offer(tz.value);
        }
        // Lower bound for the term at y, as a function of d_X(x, y) and d_X(y, z).
        let lower = |y: &PointId| -> Q {
            let left = bd.coercive.map_or(bd.floor, |c| s.dist(x, y) + c);
            let right = br.coercive.map_or(br.floor, |c| s.dist(y, z) + c);
            left + right
        };
        let (cands, cert) = match (bd.coercive, br.coercive) {
            (Some(c), _) => self.candidates(x, &(acc.best - c - br.floor), scope)?,
            (None, Some(c)) => self.candidates(z, &(acc.best - c - bd.floor), scope)?,
            (None, None) => match scope {
                Scope::Window(w) => (
                    window_points(s, w)?,
                    Certified {
                        value: (),
                        exact: false,
                        required_radius: None,
                    },
                ),
                Scope::Free => {
                    return Err(Error::inconclusive(
                        format!("{}: composition of two non-coercive kernels has no finite search", self.name),
                        None,
                    ))
                }
            },
        };
        acc.absorb(&cert);
        let mut order: Vec<&PointId> = cands.iter().collect();
        order.sort_by_key(|y| lower(y));
        for y in order {
            if lower(y) >= acc.best {
                break;
            }
            let t = term(y)?;
            acc.absorb(&t);
            acc.offer(t.value);
        }
        Ok(acc.done())
    }

    /// `d(x, X′) = inf_y d(x, y′)`.
    pub fn dist_to_copy(&self, x: &PointId, scope: Scope) -> Result<Certified<Q>> {
        let s = &self.space;
        match &*self.kernel {
            Kernel::Delta(delta) => {
                let floor = delta.floor();
                let mut acc = Acc::new(delta.eval(s, x)?);
                let (cands, cert) = self.candidates(x, &(acc.best - floor), scope)?;
                acc.absorb(&cert);
                for u in &cands {
                    if s.dist(x, u) + floor < acc.best {
                        acc.offer(s.dist(x, u) + delta.eval(s, u)?);
                    }
                }
                Ok(acc.done())
            }
            Kernel::ZeroAt(x0) => Ok(Certified::exact(s.distance(x, x0)? + q(1))),
            Kernel::Subset(a) => {
                let dx = self.set_distance(x, a, scope)?;
                Ok(Certified {
                    value: dx.value + q(1),
                    ..dx
                })
            }
            Kernel::MinGlue(d1, d2) => {
                let floor = self.bound().floor;
                let m = |u: &PointId| -> Result<Certified<Q>> {
                    let (a, b) = (d1.eval(u, u, scope)?, d2.eval(u, u, scope)?);
                    let mut acc = Acc::new(a.value.min(b.value));
                    acc.absorb(&a);
                    acc.absorb(&b);
                    Ok(acc.done())
                };
                let mx = m(x)?;
                let mut acc = Acc::new(mx.value);
                acc.absorb(&mx);
                let (cands, cert) = self.candidates(x, &(acc.best - floor), scope)?;
                acc.absorb(&cert);
                for u in &cands {
                    if s.dist(x, u) + floor < acc.best {
                        let mu = m(u)?;
                        acc.absorb(&mu);
                        acc.offer(s.dist(x, u) + mu.value);
                    }
                }
                Ok(acc.done())
            }
            _ => {
                let start = self.eval(x, x, scope)?;
                let mut acc = Acc::new(start.value);
                acc.absorb(&start);
                let b = self.bound();
                let (cands, cert) = match (b.coercive, scope) {
                    (Some(c), _) => self.candidates(x, &(acc.best - c), scope)?,
                    (None, Scope::Window(w)) => (
                        window_points(s, w)?,
                        Certified {
                            value: (),
                            exact: false,
                            required_radius: None,
                        },
                    ),
                    (None, Scope::Free) => {
                        return Err(Error::inconclusive(
                            format!("{}: distance to the copy needs a coercive kernel", self.name),
                            None,
                        ))
                    }
                };
                acc.absorb(&cert);
                for y in &cands {
                    if b.coercive.is_none_or(|c| s.dist(x, y) + c < acc.best) {
                        let v = self.eval(x, y, scope)?;
                        acc.absorb(&v);
                        acc.offer(v.value);
                    }
                }
                Ok(acc.done())
            }
        }
    }

    /// `d(x′, X) = inf_y d(y, x′)`.
    pub fn dist_from_copy(&self, x: &PointId, scope: Scope) -> Result<Certified<Q>> {
        self.adjoint().dist_to_copy(x, scope)
    }

    /// Minimisation over every window point, with no pruning.
    pub fn brute_force(&self, x: &PointId, y: &PointId, w: &Window) -> Result<Q> {
        let s = &self.space;
        let pts = window_points(s, w)?;
        let best = |vals: Vec<Q>, start: Q| vals.into_iter().fold(start, |a, b| a.min(b));
        Ok(match &*self.kernel {
            Kernel::Delta(delta) => {
                let mut vals = Vec::with_capacity(pts.len());
                for u in &pts {
                    vals.push(s.dist(x, u) + delta.eval(s, u)? + s.dist(u, y));
                }
                best(vals, delta.eval(s, x)? + s.dist(x, y))
            }
            Kernel::MinGlue(d1, d2) => {
                let mut vals = Vec::with_capacity(pts.len());
                for u in &pts {
                    let m = d1.brute_force(u, u, w)?.min(d2.brute_force(u, u, w)?);
                    vals.push(s.dist(x, u) + m + s.dist(u, y));
                }
                vals.into_iter().min().expect("window contains its basepoint")
            }
            Kernel::Compose(d, rho) => {
                let mut vals = Vec::with_capacity(pts.len());
                for u in &pts {
                    vals.push(d.brute_force(x, u, w)? + rho.brute_force(u, y, w)?);
                }
                vals.into_iter().min().expect("window contains its basepoint")
            }
            Kernel::Adjoint(d) => d.brute_force(y, x, w)?,
            Kernel::Max(d1, d2) => d1.brute_force(x, y, w)?.max(d2.brute_force(x, y, w)?),
            _ => self.eval(x, y, Scope::Window(w))?.value,
        })
    }

    /// [`brute_force`](Self::brute_force) for every pair of window points at once,
    /// built bottom-up so nested kernels cost `O(n³)` instead of `O(n⁴)`.
    pub fn brute_force_matrix(&self, w: &Window) -> Result<(Vec<PointId>, Vec<Vec<Q>>)> {
        let s = &self.space;
        let pts = window_points(s, w)?;
        let dx: Vec<Vec<Q>> = pts.iter().map(|a| pts.iter().map(|b| s.dist(a, b)).collect()).collect();
        let spread = |c: &[Q]| -> Vec<Vec<Q>> {
            (0..pts.len())
                .map(|i| (0..pts.len()).map(|j| (0..pts.len()).map(|u| dx[i][u] + c[u] + dx[u][j]).min().unwrap()).collect())
                .collect()
        };
        let m = match &*self.kernel {
            Kernel::Delta(delta) => {
                let c = pts.iter().map(|u| delta.eval(s, u)).collect::<Result<Vec<_>>>()?;
                let mut m = spread(&c);
                for (i, row) in m.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = (*v).min(c[i] + dx[i][j]);
                    }
                }
                m
            }
            Kernel::MinGlue(d1, d2) => {
                let (m1, m2) = (d1.brute_force_matrix(w)?.1, d2.brute_force_matrix(w)?.1);
                let c: Vec<Q> = (0..pts.len()).map(|u| m1[u][u].min(m2[u][u])).collect();
                spread(&c)
            }
            Kernel::Compose(d, rho) => {
                let (a, b) = (d.brute_force_matrix(w)?.1, rho.brute_force_matrix(w)?.1);
                (0..pts.len())
                    .map(|i| (0..pts.len()).map(|j| (0..pts.len()).map(|u| a[i][u] + b[u][j]).min().unwrap()).collect())
                    .collect()
            }
            Kernel::Adjoint(d) => {
                let a = d.brute_force_matrix(w)?.1;
                (0..pts.len()).map(|i| (0..pts.len()).map(|j| a[j][i]).collect()).collect()
            }
            Kernel::Max(d1, d2) => {
                let (a, b) = (d1.brute_force_matrix(w)?.1, d2.brute_force_matrix(w)?.1);
                a.iter().zip(&b).map(|(r1, r2)| r1.iter().zip(r2).map(|(u, v)| *u.max(v)).collect()).collect()
            }
            _ => pts
                .iter()
                .map(|x| pts.iter().map(|y| Ok(self.eval(x, y, Scope::Window(w))?.value)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        };
        Ok((pts, m))
    }
}

fn same_space(a: &DoubleMetric, b: &DoubleMetric) -> Result<()> {
    if a.space != b.space {
        return Err(Error::domain(format!(
            "{} lives on {} but {} lives on {}",
            a.name,
            a.space.name(),
            b.name,
            b.space.name()
        )));
    }
    Ok(())
}

/// Outcome of an exhaustive axiom check on a window.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AxiomReport {
    pub metric: String,
    pub points: usize,
    pub passed: bool,
    /// False when some kernel value could not be certified and a window value was used.
    pub exact: bool,
    pub checks: u64,
    pub violation: Option<String>,
}

fn kernel_matrix(d: &DoubleMetric, pts: &[PointId], w: &Window) -> Result<(Vec<Vec<Q>>, bool)> {
    let rows = par::try_map(pts, |x| -> Result<(Vec<Q>, bool)> {
        let mut row = Vec::with_capacity(pts.len());
        let mut exact = true;
        for y in pts {
            let v = match d.eval(x, y, Scope::Free) {
                Ok(v) => v,
                Err(Error::Inconclusive { .. }) => d.eval(x, y, Scope::Window(w))?,
                Err(e) => return Err(e),
            };
            exact &= v.exact;
            row.push(v.value);
        }
        Ok((row, exact))
    })?;
    let exact = rows.iter().all(|r| r.1);
    Ok((rows.into_iter().map(|r| r.0).collect(), exact))
}

/// Checks positivity and all four mixed triangle inequalities on every window triple.
pub fn check_axioms(d: &DoubleMetric, w: &Window) -> Result<AxiomReport> {
    let s = d.space();
    let pts = window_points(s, w)?;
    let n = pts.len();
    let (k, exact) = kernel_matrix(d, &pts, w)?;
    let dx: Vec<Vec<Q>> = pts.iter().map(|a| pts.iter().map(|b| s.dist(a, b)).collect()).collect();
    let mut report = AxiomReport {
        metric: d.name().to_string(),
        points: n,
        passed: true,
        exact,
        checks: 0,
        violation: None,
    };
    for (i, row) in k.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            report.checks += 1;
            if !v.is_positive() {
                report.passed = false;
                report.violation = Some(format!("(d2) d({}, {}′) = {} is not positive", pts[i], pts[j], format_q(v)));
                return Ok(report);
            }
        }
    }
    let integral = k.iter().flatten().chain(dx.iter().flatten()).all(|v| v.is_integer());
    let idx: Vec<usize> = (0..n).collect();
    let found = if integral {
        let ki: Vec<Vec<i64>> = k.iter().map(|r| r.iter().map(|v| v.to_integer()).collect()).collect();
        let di: Vec<Vec<i64>> = dx.iter().map(|r| r.iter().map(|v| v.to_integer()).collect()).collect();
        par::map(&idx, |&a| first_violation(n, a, |i, j| ki[i][j], |i, j| di[i][j]))
    } else {
        par::map(&idx, |&a| first_violation(n, a, |i, j| k[i][j], |i, j| dx[i][j]))
    };
    report.checks += 4 * (n as u64).pow(3);
    if let Some((kind, a, b, c)) = found.into_iter().flatten().next() {
        report.passed = false;
        report.violation = Some(match kind {
            0 => format!(
                "d_X({}, {}) <= d({}, {}′) + d({}, {}′) fails",
                pts[a], pts[b], pts[a], pts[c], pts[b], pts[c]
            ),
            1 => format!(
                "d({}, {}′) <= d_X({}, {}) + d({}, {}′) fails",
                pts[a], pts[c], pts[a], pts[b], pts[b], pts[c]
            ),
            2 => format!(
                "d_X({}, {}) <= d({}, {}′) + d({}, {}′) fails",
                pts[a], pts[b], pts[c], pts[a], pts[c], pts[b]
            ),
            _ => format!(
                "d({}, {}′) <= d({}, {}′) + d_X({}, {}) fails",
                pts[c], pts[a], pts[c], pts[b], pts[b], pts[a]
            ),
        });
    }
    Ok(report)
}

/// First violated inequality with first index `a`, scanning `(b, c)` in order.
fn first_violation<T, K, D>(n: usize, a: usize, k: K, dx: D) -> Option<(u8, usize, usize, usize)>
where
    T: Copy + PartialOrd + std::ops::Add<Output = T>,
    K: Fn(usize, usize) -> T,
    D: Fn(usize, usize) -> T,
{
    for b in 0..n {
        for c in 0..n {
            if dx(a, b) > k(a, c) + k(b, c) {
                return Some((0, a, b, c));
            }
            if k(a, c) > dx(a, b) + k(b, c) {
                return Some((1, a, b, c));
            }
            if dx(a, b) > k(c, a) + k(c, b) {
                return Some((2, a, b, c));
            }
            if k(c, a) > k(c, b) + dx(b, a) {
                return Some((3, a, b, c));
            }
        }
    }
    None
}

/// Whether `d` and its adjoint agree on every window pair.
pub fn is_selfadjoint(d: &DoubleMetric, w: &Window) -> Result<bool> {
    let pts = window_points(d.space(), w)?;
    let rows = par::try_map(&pts, |x| -> Result<bool> {
        for y in &pts {
            if y < x {
                continue;
            }
            if d.eval(x, y, Scope::Window(w))?.value != d.eval(y, x, Scope::Window(w))?.value {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(rows.into_iter().all(|b| b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::LevelFunction;
    use crate::space::Phi;

    fn p(x: i64) -> PointId {
        PointId::p1(x)
    }

    #[test]
    fn eval_examples() {
        let nat = MetricSpace::NatLine;
        let one = DoubleMetric::delta(&nat, DeltaFn::Const(q(1)));
        assert_eq!(one.eval(&p(3), &p(7), Scope::Free).unwrap().value, q(5));
        let z = DoubleMetric::zero_at(&nat, p(0)).unwrap();
        assert_eq!(z.eval(&p(3), &p(5), Scope::Free).unwrap().value, q(9));
        let e0 = LevelFunction::from_subset(&nat, PointSet::explicit("{0}", [p(0)]));
        let d = DoubleMetric::delta(&nat, DeltaFn::Levels(e0));
        assert_eq!(d.eval(&p(4), &p(4), Scope::Free).unwrap().value, q(8));
    }

    #[test]
    fn compose_examples() {
        let nat = MetricSpace::NatLine;
        let z = DoubleMetric::zero_at(&nat, p(0)).unwrap();
        let zz = DoubleMetric::compose(&z, &z).unwrap();
        assert_eq!(zz.eval(&p(2), &p(3), Scope::Free).unwrap().value, q(7));
        let w = Window::around(&nat, 12);
        assert_eq!(zz.brute_force(&p(2), &p(3), &w).unwrap(), q(7));

        let tt = MetricSpace::TwoTails(Phi::Ruler);
        let plus = DoubleMetric::subset(&tt, PointSet::predicate("A+", |x| x.y() > 0)).unwrap();
        let minus = DoubleMetric::subset(&tt, PointSet::predicate("A-", |x| x.y() < 0)).unwrap();
        let b = DoubleMetric::compose(&plus, &minus).unwrap();
        let x = PointId::p2(4, 2);
        let w = Window::around(&tt, 40);
        let v = b.eval(&x, &x, Scope::Window(&w)).unwrap();
        assert_eq!(v.value, q(8));
        assert!(!v.exact);
        assert!(b.eval(&x, &x, Scope::Free).is_err());
    }

    #[test]
    fn dist_to_copy_examples() {
        let nat = MetricSpace::NatLine;
        let z = DoubleMetric::zero_at(&nat, p(0)).unwrap();
        assert_eq!(z.dist_to_copy(&p(4), Scope::Free).unwrap().value, q(5));
        let one = DoubleMetric::delta(&nat, DeltaFn::Const(q(1)));
        assert_eq!(one.dist_to_copy(&p(9), Scope::Free).unwrap().value, q(1));
        let evens = DoubleMetric::subset(&nat, PointSet::predicate("evens", |x| x.x() % 2 == 0)).unwrap();
        assert_eq!(evens.dist_to_copy(&p(3), Scope::Free).unwrap().value, q(2));
        assert_eq!(evens.eval(&p(3), &p(6), Scope::Free).unwrap().value, q(2));
    }

    #[test]
    fn window_exactness() {
        let nat = MetricSpace::NatLine;
        let e0 = LevelFunction::from_subset(&nat, PointSet::explicit("{0}", [p(0)]));
        let d = DoubleMetric::delta(&nat, DeltaFn::Levels(e0));
        let w = Window::around(&nat, 10);
        let near = d.eval(&p(1), &p(1), Scope::Window(&w)).unwrap();
        assert!(near.exact);
        let far = d.eval(&p(9), &p(9), Scope::Window(&w)).unwrap();
        assert!(!far.exact);
        assert_eq!(far.value, d.eval(&p(9), &p(9), Scope::Free).unwrap().value);
        assert_eq!(far.value, d.brute_force(&p(9), &p(9), &w).unwrap());
    }

    #[test]
    fn adjoint_is_involution() {
        let nat = MetricSpace::NatLine;
        let z = DoubleMetric::zero_at(&nat, p(0)).unwrap();
        let one = DoubleMetric::delta(&nat, DeltaFn::Const(q(1)));
        let c = DoubleMetric::compose(&z, &one).unwrap();
        let cs = DoubleMetric::compose(&one.adjoint(), &z.adjoint()).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                let (x, y) = (p(x), p(y));
                let a = c.adjoint().eval(&x, &y, Scope::Free).unwrap().value;
                assert_eq!(a, cs.eval(&x, &y, Scope::Free).unwrap().value);
                assert_eq!(
                    c.adjoint().adjoint().eval(&x, &y, Scope::Free).unwrap().value,
                    c.eval(&x, &y, Scope::Free).unwrap().value
                );
                assert_eq!(z.adjoint().eval(&x, &y, Scope::Free).unwrap().value, z.eval(&x, &y, Scope::Free).unwrap().value);
            }
        }
    }

    #[test]
    fn brute_force_matrix_matches_pairs() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 12);
        let one = DoubleMetric::delta(&nat, DeltaFn::Const(q(1)));
        let z = DoubleMetric::zero_at(&nat, p(3)).unwrap();
        let g = DoubleMetric::min_glue(&one, &z).unwrap();
        let c = DoubleMetric::compose(&g, &z).unwrap().adjoint();
        for d in [g, c, DoubleMetric::pointwise_max(&one, &z).unwrap()] {
            let (pts, m) = d.brute_force_matrix(&w).unwrap();
            for (i, x) in pts.iter().enumerate() {
                for (j, y) in pts.iter().enumerate() {
                    assert_eq!(m[i][j], d.brute_force(x, y, &w).unwrap(), "{} {x} {y}", d.name());
                }
            }
        }
    }

    #[test]
    fn axioms() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 3);
        let bad = DoubleMetric::closed_unchecked(&nat, "one", Bound { coercive: None, floor: q(1) }, |_, _, _| Ok(q(1)));
        let r = check_axioms(&bad, &w).unwrap();
        assert!(!r.passed);
        assert_eq!(r.violation.as_deref(), Some("d_X(0, 3) <= d(0, 0′) + d(3, 0′) fails"));
        let z = DoubleMetric::zero_at(&nat, p(0)).unwrap();
        let e = DoubleMetric::delta(&nat, DeltaFn::Expr(Expr::parse("1 + x").unwrap()));
        let m = DoubleMetric::pointwise_max(&z, &e).unwrap();
        for d in [&z, &e, &m] {
            assert!(check_axioms(d, &Window::around(&nat, 20)).unwrap().passed);
        }
    }
}
