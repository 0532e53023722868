//! Named sets, textual level and kernel specifications, and the worked examples built
//! from them. Shared by the command line and the test suites.

use crate::double::{Bound, DeltaFn, DoubleMetric};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::projection::LevelFunction;
use crate::rational::{parse_q, q};
use crate::space::{certified_dist_to_set, MetricSpace, Phi, PointId, PointSet, DEFAULT_SEARCH_CAP};
use num_integer::Roots;
use serde::{Deserialize, Serialize};

/// `3` or `(4,-2)`.
pub fn parse_point(s: &str) -> Result<PointId> {
    let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let coords = t
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad point {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    PointId::from_coords(&coords)
}

/// Splits a point list such as `{0,1,(4,2)}` at top-level commas.
fn split_points(body: &str) -> Vec<String> {
    let (mut out, mut cur, mut depth) = (Vec::new(), String::new(), 0);
    for c in body.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur);
    }
    out
}

fn is_square(v: i64) -> bool {
    v >= 0 && {
        let r = v.sqrt();
        r * r == v
    }
}

fn two_exponent(p: &PointId) -> Option<u32> {
    let x = p.x();
    (x > 0 && (x as u64).is_power_of_two()).then(|| x.trailing_zeros())
}

pub const SET_NAMES: &[&str] = &[
    "all", "base", "evens", "odds", "squares", "powers2", "powers4", "twice-powers4", "mult4", "mult4plus2", "nonpos",
    "nonneg", "plus-tail", "minus-tail",
];

/// A named subset, an explicit list `{p, q, …}`, or `not:NAME`.
pub fn named_set(space: &MetricSpace, name: &str) -> Result<PointSet> {
    let name = name.trim();
    if let Some(inner) = name.strip_prefix("not:") {
        return Ok(named_set(space, inner)?.complement());
    }
    if let Some(body) = name.strip_prefix('{').and_then(|b| b.strip_suffix('}')) {
        let pts = split_points(body).iter().map(|p| parse_point(p)).collect::<Result<Vec<_>>>()?;
        if let Some(bad) = pts.iter().find(|p| !space.contains(p)) {
            return Err(Error::domain(format!("{bad} is not a point of {}", space.name())));
        }
        return Ok(PointSet::explicit(name, pts));
    }
    let set = match name {
        "all" => PointSet::everything(),
        "base" => {
            let b = space.basepoint();
            PointSet::explicit(format!("{{{b}}}"), [b])
        }
        "evens" => PointSet::predicate(name, |p| p.x().rem_euclid(2) == 0),
        "odds" => PointSet::predicate(name, |p| p.x().rem_euclid(2) == 1),
        "squares" => PointSet::predicate(name, |p| is_square(p.x())),
        "powers2" => PointSet::predicate(name, |p| two_exponent(p).is_some()),
        "powers4" => PointSet::predicate(name, |p| two_exponent(p).is_some_and(|k| k % 2 == 0)),
        "twice-powers4" => PointSet::predicate(name, |p| two_exponent(p).is_some_and(|k| k % 2 == 1)),
        "mult4" => PointSet::predicate(name, |p| p.x().rem_euclid(4) == 0),
        "mult4plus2" => PointSet::predicate(name, |p| p.x().rem_euclid(4) == 2),
        "nonpos" => PointSet::predicate(name, |p| p.x() <= 0),
        "nonneg" => PointSet::predicate(name, |p| p.x() >= 0),
        "plus-tail" => PointSet::predicate(name, |p| p.dim() == 2 && p.y() > 0),
        "minus-tail" => PointSet::predicate(name, |p| p.dim() == 2 && p.y() < 0),
        _ => {
            return Err(Error::Parse(format!(
                "unknown set {name:?}; known: {}, {{p,q,…}}, not:NAME",
                SET_NAMES.join(", ")
            )))
        }
    };
    Ok(set)
}

/// `1`, `0`, `subset:SET`, `expr:EXPR` or `metric:KERNEL`.
pub fn parse_level(space: &MetricSpace, spec: &str) -> Result<LevelFunction> {
    let spec = spec.trim();
    match spec {
        "1" | "unit" => return Ok(LevelFunction::unit(space)),
        "0" | "zero" => return Ok(LevelFunction::zero(space)),
        _ => {}
    }
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("level spec {spec:?} needs a kind prefix (subset:, expr:, metric:)")))?;
    match kind {
        "subset" => Ok(LevelFunction::from_subset(space, named_set(space, arg)?)),
        "expr" => Ok(LevelFunction::from_expr(space, Expr::parse(arg)?)),
        "metric" => Ok(LevelFunction::from_metric(&parse_kernel(space, arg)?)),
        _ => Err(Error::Parse(format!("unknown level kind {kind:?}"))),
    }
}

/// Kernel specification, as JSON (`{"kind": …}`) or shorthand `kind:arg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// `δ` given as a constant or an expression.
    Delta { delta: String },
    /// `δ = max(λ, 1)` for a level spec.
    DeltaLevels { levels: String },
    ZeroAt { point: PointId },
    Subset { set: String },
    Compose { d: Box<KernelSpec>, rho: Box<KernelSpec> },
    Adjoint { of: Box<KernelSpec> },
    Max { a: Box<KernelSpec>, b: Box<KernelSpec> },
    MinGlue { a: Box<KernelSpec>, b: Box<KernelSpec> },
    /// `d_X(x, A⁺) + d_X(y, A⁻) + 4` on a two-tailed space.
    TailProduct,
}

impl KernelSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        if s == "tail-product" {
            return Ok(KernelSpec::TailProduct);
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("kernel spec {s:?} needs a kind prefix")))?;
        let arg = arg.to_string();
        Ok(match kind {
            "delta" => KernelSpec::Delta { delta: arg },
            "delta-levels" => KernelSpec::DeltaLevels { levels: arg },
            "zero-at" => KernelSpec::ZeroAt { point: parse_point(&arg)? },
            "subset" => KernelSpec::Subset { set: arg },
            "adjoint" => KernelSpec::Adjoint {
                of: Box::new(KernelSpec::parse(&arg)?),
            },
            _ => return Err(Error::Parse(format!("unknown kernel kind {kind:?}; compound kernels need JSON"))),
        })
    }

    pub fn build(&self, space: &MetricSpace) -> Result<DoubleMetric> {
        Ok(match self {
            KernelSpec::Delta { delta } => {
                let d = match parse_q(delta) {
                    Ok(c) => DeltaFn::Const(c),
                    Err(_) => DeltaFn::Expr(Expr::parse(delta)?),
                };
                DoubleMetric::delta(space, d)
            }
            KernelSpec::DeltaLevels { levels } => DoubleMetric::delta(space, DeltaFn::Levels(parse_level(space, levels)?)),
            KernelSpec::ZeroAt { point } => DoubleMetric::zero_at(space, *point)?,
            KernelSpec::Subset { set } => DoubleMetric::subset(space, named_set(space, set)?)?,
            KernelSpec::Compose { d, rho } => DoubleMetric::compose(&d.build(space)?, &rho.build(space)?)?,
            KernelSpec::Adjoint { of } => of.build(space)?.adjoint(),
            KernelSpec::Max { a, b } => DoubleMetric::pointwise_max(&a.build(space)?, &b.build(space)?)?,
            KernelSpec::MinGlue { a, b } => DoubleMetric::min_glue(&a.build(space)?, &b.build(space)?)?,
            KernelSpec::TailProduct => tail_product(space)?,
        })
    }
}

pub fn parse_kernel(space: &MetricSpace, s: &str) -> Result<DoubleMetric> {
    KernelSpec::parse(s)?.build(space)
}

/// The upper and lower tails `A± = {(n², ±φ(n))}` of a two-tailed space.
pub fn tails(space: &MetricSpace) -> Result<(PointSet, PointSet)> {
    if !matches!(space, MetricSpace::TwoTails(_)) {
        return Err(Error::domain(format!("{} has no tails", space.name())));
    }
    Ok((named_set(space, "plus-tail")?, named_set(space, "minus-tail")?))
}

/// Closed form of `b₋ ∘ b₊`: `b(x, y′) = d_X(x, A⁺) + d_X(y, A⁻) + 4`.
pub fn tail_product(space: &MetricSpace) -> Result<DoubleMetric> {
    let (plus, minus) = tails(space)?;
    let gap = match space {
        MetricSpace::TwoTails(_) => q(2),
        _ => unreachable!(),
    };
    DoubleMetric::closed(
        space,
        "b₋∘b₊",
        Bound {
            coercive: None,
            floor: q(2) + gap,
        },
        move |s, x, y| {
            let cap = q(DEFAULT_SEARCH_CAP);
            Ok(certified_dist_to_set(s, x, &plus, &cap)? + certified_dist_to_set(s, y, &minus, &cap)? + q(4))
        },
    )
}

/// `[b₊]`, `[b₋]` and the closed-form product on the ruler two-tailed space.
pub fn type_one_example() -> Result<(MetricSpace, DoubleMetric, DoubleMetric, DoubleMetric)> {
    let tt = MetricSpace::TwoTails(Phi::Ruler);
    let (plus, minus) = tails(&tt)?;
    let bp = DoubleMetric::subset(&tt, plus)?.named("b₊");
    let bm = DoubleMetric::subset(&tt, minus)?.named("b₋");
    let prod = tail_product(&tt)?;
    Ok((tt, bp, bm, prod))
}

/// `{4^k}` and `{2·4^k}` on the geometric line.
pub fn geometric_pair() -> (MetricSpace, LevelFunction, LevelFunction) {
    let g = MetricSpace::GeomLine;
    let a = LevelFunction::from_subset(&g, named_set(&g, "powers4").expect("known set"));
    let b = LevelFunction::from_subset(&g, named_set(&g, "twice-powers4").expect("known set"));
    (g, a, b)
}
