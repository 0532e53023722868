//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use coarse_double::asymptotics::{equivalent, is_zero, Mode};
use coarse_double::boolean::{algebra_report, atom_parts, check_hom, is_nonzero, tau, AtomPattern, FilterBase};
use coarse_double::catalog::{geometric_pair, named_set, type_one_example};
use coarse_double::double::{check_axioms, DeltaFn, DoubleMetric, Scope};
use coarse_double::error::Result;
use coarse_double::expr::Expr;
use coarse_double::ideals::{check_au, level_recovery, ApproximateUnit};
use coarse_double::measure::{check_modularity, nu_bar, nu_hat, DensityMeasure};
use coarse_double::projection::{
    classify_sweep, classify_type, join, levels_from_metric, meet, metric_from_levels, metric_join, projection_criterion,
    LevelFunction, TypeParams,
};
use coarse_double::rational::{ceil_i64, q, qr};
use coarse_double::revalidate::{self, Recheck};
use coarse_double::space::{neighborhood, GEOM_MAX_EXP, window_points, MetricSpace, Phi, PointId, Window};
use coarse_double::verdict::{Grid, Verdict, Witness};
use coarse_double::Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

const SEED: u64 = 0x5eed;
const AXIOM_KERNELS: usize = 20;
const AXIOM_MIN_POINTS: usize = 200;
const ORACLE_TRIPLES: usize = 10_000;
const SANDWICH_KERNELS: usize = 10;
const LATTICE_TRIPLES: usize = 10_000;
const TYPE_RADII: [i64; 3] = [30, 110, 420];
const EX2_K_MAX: i64 = 8;
const EX2_RADIUS: i64 = 1 << 18;
const HALF_LINE_TOL: (i64, i64) = (1, 32);
const RECOVERY_SOURCES: usize = 5;

type Check = Box<dyn Fn() -> Result<Recheck>>;

/// Every certified verdict produced along the way, with its independent re-check.
#[derive(Default)]
struct Certificates(Vec<(String, Check)>);

impl Certificates {
    fn add(&mut self, v: &Verdict, check: Check) {
        if v.is_certified() {
            self.0.push((v.claim.clone(), check));
        }
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

/// Smallest radius whose window holds at least `min` points. The search stops at
/// `2^(GEOM_MAX_EXP - 1)`, the largest radius at which geometric-line kernels stay
/// certifiable; the flag is false when even that window is too small.
fn window_with(space: &MetricSpace, min: usize) -> Result<(Window, bool)> {
    let count = |r: i64| -> Result<usize> { Ok(window_points(space, &Window::around(space, r))?.len()) };
    let limit = 1i64 << (GEOM_MAX_EXP - 1);
    let mut hi = 8;
    while count(hi)? < min {
        if hi >= limit {
            return Ok((Window::around(space, limit), false));
        }
        hi = (hi * 2).min(limit);
    }
    let mut lo = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if count(mid)? >= min {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((Window::around(space, hi), true))
}

fn random_delta(rng: &mut ChaCha8Rng, space: &MetricSpace, w: &Window) -> Result<DoubleMetric> {
    let sets: &[&str] = match space {
        MetricSpace::GeomLine => &["powers4", "twice-powers4", "base"],
        MetricSpace::TwoTails(_) => &["plus-tail", "minus-tail", "base"],
        _ => &["evens", "squares", "powers2", "mult4", "nonneg", "base"],
    };
    let d = match rng.random_range(0..4) {
        0 => DeltaFn::Const(qr(rng.random_range(2..12), rng.random_range(1..3))),
        1 => {
            let values = window_points(space, w)?
                .into_iter()
                .map(|p| (p, qr(rng.random_range(3..40), 3)))
                .collect::<BTreeMap<_, _>>();
            DeltaFn::Table {
                values: Arc::new(values),
                default: q(rng.random_range(1..6)),
            }
        }
        2 => DeltaFn::Levels(LevelFunction::from_subset(space, named_set(space, pick(rng, sets))?)),
        _ => DeltaFn::Expr(Expr::parse(&format!("1 + r/{}", rng.random_range(1..6)))?),
    };
    Ok(DoubleMetric::delta(space, d))
}

fn builtin_spaces() -> Vec<MetricSpace> {
    vec![MetricSpace::NatLine, MetricSpace::IntLine, MetricSpace::GeomLine, MetricSpace::TwoTails(Phi::Ruler)]
}

fn c01() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let spaces = builtin_spaces();
    let (mut passed, mut small) = (0, Vec::new());
    let mut failures = Vec::new();
    for i in 0..AXIOM_KERNELS {
        let s = &spaces[i % spaces.len()];
        let (w, big_enough) = window_with(s, AXIOM_MIN_POINTS)?;
        let n = window_points(s, &w)?.len();
        if !big_enough && !small.iter().any(|(name, _)| *name == s.name()) {
            small.push((s.name(), n));
        }
        let d = random_delta(&mut rng, s, &w)?;
        let rep = check_axioms(&d, &w)?;
        if rep.passed && rep.exact {
            passed += 1;
        } else {
            failures.push(format!("{} on {}: {:?}", d.name(), s.name(), rep.violation));
        }
    }
    let mut detail = format!("{passed}/{AXIOM_KERNELS} kernels pass exhaustively");
    for (name, n) in &small {
        detail += &format!("; {name} has only {n} points (< {AXIOM_MIN_POINTS})");
    }
    for f in &failures {
        detail += &format!("; {f}");
    }
    Ok(outcome(failures.is_empty() && small.is_empty(), detail))
}

fn oracle_kernels(space: &MetricSpace) -> Result<Vec<DoubleMetric>> {
    let b = space.basepoint();
    let c3 = DoubleMetric::delta(space, DeltaFn::Const(q(3)));
    let lv = DoubleMetric::delta(space, DeltaFn::Levels(LevelFunction::from_subset(space, named_set(space, "squares")?)));
    let ex = DoubleMetric::delta(space, DeltaFn::Expr(Expr::parse("1 + r/2")?));
    let z = DoubleMetric::zero_at(space, b)?;
    let sub = DoubleMetric::subset(space, named_set(space, "mult4")?)?;
    Ok(vec![
        c3.clone(),
        lv.clone(),
        ex.clone(),
        z.clone(),
        sub.clone(),
        DoubleMetric::compose(&c3, &z)?,
        DoubleMetric::compose(&sub, &lv)?.adjoint(),
        DoubleMetric::min_glue(&lv, &ex)?,
        DoubleMetric::pointwise_max(&c3, &sub)?,
    ])
}

fn c02() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut cases = Vec::new();
    for (s, r) in [(MetricSpace::NatLine, 40), (MetricSpace::IntLine, 20)] {
        let w = Window::around(&s, r);
        let pts = window_points(&s, &w)?;
        for k in oracle_kernels(&s)? {
            cases.push((k, w.clone(), pts.clone()));
        }
    }
    let (mut exact, mut mismatches) = (0, Vec::new());
    for _ in 0..ORACLE_TRIPLES {
        let (d, w, pts) = pick(&mut rng, &cases);
        let (x, y) = (pick(&mut rng, pts), pick(&mut rng, pts));
        let pruned = d.eval(x, y, Scope::Window(w))?;
        let brute = d.brute_force(x, y, w)?;
        if pruned.value != brute {
            mismatches.push(format!("{} at ({x},{y})", d.name()));
        }
        if pruned.exact {
            exact += 1;
            if d.eval(x, y, Scope::Free)?.value != brute {
                mismatches.push(format!("{} free value at ({x},{y})", d.name()));
            }
        }
    }
    Ok(outcome(
        mismatches.is_empty(),
        format!("{ORACLE_TRIPLES} triples, {exact} flagged exact, {} mismatches{}", mismatches.len(), first(&mismatches)),
    ))
}

fn value_on(d: &DoubleMetric, x: &PointId, w: &Window) -> Result<Q> {
    Ok(match d.eval(x, x, Scope::Free) {
        Ok(v) => v.value,
        Err(_) => d.eval(x, x, Scope::Window(w))?.value,
    })
}

fn c03() -> Result<Outcome> {
    let nat = MetricSpace::NatLine;
    let w = Window::around(&nat, 64);
    let mut kernels = oracle_kernels(&nat)?;
    kernels.push(DoubleMetric::delta(&nat, DeltaFn::Expr(Expr::parse("3/2 + floor(r/5)")?)));
    kernels.truncate(SANDWICH_KERNELS);
    let pts = window_points(&nat, &w)?;
    let mut bad = Vec::new();
    for d in &kernels {
        let da = metric_from_levels(&levels_from_metric(d, &w)?);
        for x in &pts {
            let n = ceil_i64(&value_on(d, x, &w)?);
            let v = da.eval(x, x, Scope::Free)?.value;
            if !(q(n - 1) <= v && v <= q(n)) {
                bad.push(format!("{} at {x}", d.name()));
            }
        }
    }
    Ok(outcome(
        bad.is_empty(),
        format!("{} kernels × {} points, {} violations{}", kernels.len(), pts.len(), bad.len(), first(&bad)),
    ))
}

/// δ-generated kernels on a moderate window of every built-in space.
fn projection_cases() -> Result<Vec<(DoubleMetric, Window)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut out = Vec::new();
    for s in builtin_spaces() {
        let w = match s {
            MetricSpace::GeomLine => Window::around(&s, 1 << 12),
            MetricSpace::TwoTails(_) => Window::around(&s, 500),
            _ => Window::around(&s, 48),
        };
        for _ in 0..4 {
            out.push((random_delta(&mut rng, &s, &w)?, w.clone()));
        }
    }
    Ok(out)
}

fn c04(certs: &mut Certificates) -> Result<Outcome> {
    let cases = projection_cases()?;
    let mut kernels: Vec<(DoubleMetric, Window)> = cases.clone();
    for pair in cases.chunks(2) {
        kernels.push((DoubleMetric::min_glue(&pair[0].0, &pair[1].0)?, pair[0].1.clone()));
    }
    let mut bad = Vec::new();
    for (d, w) in &kernels {
        let v = projection_criterion(d, w, &Grid::default())?;
        if v.witness != Some(Witness::Affine { alpha: 0, beta: 2 }) {
            bad.push(format!("{} on {}: {}", d.name(), d.space().name(), v.label));
        }
        if let Some(wit) = v.witness.clone() {
            let (d, w) = (d.clone(), w.clone());
            certs.add(&v, Box::new(move || revalidate::projection(&d, &wit, &w)));
        }
    }
    Ok(outcome(bad.is_empty(), format!("{} kernels certified (0,2): {} failures{}", kernels.len(), bad.len(), first(&bad))))
}

fn c05() -> Result<Outcome> {
    let cases = projection_cases()?;
    let mut checked = 0;
    let mut bad = Vec::new();
    for pair in cases.chunks(2) {
        let ((d1, w), (d2, _)) = (&pair[0], &pair[1]);
        let j = metric_join(d1, d2, w)?;
        for x in window_points(d1.space(), w)? {
            checked += 1;
            if value_on(&j, &x, w)? != value_on(d1, &x, w)?.min(value_on(d2, &x, w)?) {
                bad.push(format!("{} at {x}", j.name()));
            }
        }
    }
    Ok(outcome(bad.is_empty(), format!("{checked} diagonal values, {} mismatches{}", bad.len(), first(&bad))))
}

fn c06() -> Result<Outcome> {
    let nat = MetricSpace::NatLine;
    let mut pool = vec![LevelFunction::unit(&nat), LevelFunction::zero(&nat)];
    for name in ["evens", "odds", "squares", "powers2", "mult4"] {
        pool.push(LevelFunction::from_subset(&nat, named_set(&nat, name)?));
    }
    for src in ["floor(x/3) + 1", "abs(x - 20)", "ceilroot(x + 1, 2)"] {
        pool.push(LevelFunction::from_expr(&nat, Expr::parse(src)?));
    }
    pool.push(LevelFunction::from_metric(&DoubleMetric::zero_at(&nat, PointId::p1(5))?));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut bad = 0;
    for _ in 0..LATTICE_TRIPLES {
        let (a, b, c) = (pick(&mut rng, &pool), pick(&mut rng, &pool), pick(&mut rng, &pool));
        let p = PointId::p1(rng.random_range(0..1024));
        let at = |e: &LevelFunction| e.level(&p);
        let laws = [
            at(&meet(a, b)?)? == at(&meet(b, a)?)?,
            at(&join(a, b)?)? == at(&join(b, a)?)?,
            at(&meet(&meet(a, b)?, c)?)? == at(&meet(a, &meet(b, c)?)?)?,
            at(&join(&join(a, b)?, c)?)? == at(&join(a, &join(b, c)?)?)?,
            at(&meet(a, &join(a, b)?)?)? == at(a)?,
            at(&join(a, &meet(a, b)?)?)? == at(a)?,
            at(&meet(a, a)?)? == at(a)? && at(&join(a, a)?)? == at(a)?,
            at(&meet(a, &join(b, c)?)?)? == at(&join(&meet(a, b)?, &meet(a, c)?)?)?,
            at(&join(a, &meet(b, c)?)?)? == at(&meet(&join(a, b)?, &join(a, c)?)?)?,
        ];
        bad += laws.iter().filter(|l| !**l).count();
    }
    Ok(outcome(bad == 0, format!("{LATTICE_TRIPLES} triples × 9 laws, {bad} violations")))
}

fn c07(certs: &mut Certificates) -> Result<Outcome> {
    let (tt, bp, bm, prod) = type_one_example()?;
    let top = Window::around(&tt, *TYPE_RADII.last().unwrap());
    let pts = window_points(&tt, &top)?;
    let comp = DoubleMetric::compose(&bp, &bm)?;
    let mut mismatches = 0;
    for x in &pts {
        for y in &pts {
            if comp.brute_force(x, y, &top)? != prod.eval(x, y, Scope::Free)?.value {
                mismatches += 1;
            }
        }
    }
    let params = TypeParams::default();
    let mut type_one = Vec::new();
    for d in [&bp, &bm] {
        let e = LevelFunction::from_metric(d);
        let v = classify_type(&e, &top, params)?;
        type_one.push(v.label == "type-I");
        if let Some(wit) = v.witness.clone() {
            let w = top.clone();
            certs.add(&v, Box::new(move || revalidate::type_one(&e, &wit, &w)));
        }
    }
    let radii: Vec<Q> = TYPE_RADII.iter().map(|r| q(*r)).collect();
    let sweep = classify_sweep(&LevelFunction::from_metric(&prod), &radii, params)?;
    let growth = sweep.label == "type-II-evidence";
    let k1 = sweep
        .diagnostics
        .series
        .iter()
        .find(|s| s.points.iter().all(|p| p.1 .0 >= q(0)))
        .map(|s| s.points.iter().map(|p| p.1 .0.to_string()).collect::<Vec<_>>().join("→"))
        .unwrap_or_default();
    Ok(outcome(
        mismatches == 0 && type_one.iter().all(|t| *t) && growth,
        format!(
            "closed form on {}² points: {mismatches} mismatches; [b₊],[b₋] type I: {type_one:?}; product {} (first finite K(n): {k1})",
            pts.len(),
            sweep.label
        ),
    ))
}

fn c08(certs: &mut Certificates) -> Result<Outcome> {
    let (g, a, b) = geometric_pair();
    let set_a = named_set(&g, "powers4")?;
    let mut extra = Vec::new();
    for k in 1..=EX2_K_MAX {
        let counts = [EX2_RADIUS, 2 * EX2_RADIUS, 4 * EX2_RADIUS]
            .iter()
            .map(|r| -> Result<usize> {
                let w = Window::around(&g, *r);
                let nk = neighborhood(&g, &set_a, &q(k), &w)?.value;
                let pts = window_points(&g, &w)?;
                Ok(pts.iter().filter(|p| nk.contains(p).unwrap() && !set_a.contains(p).unwrap()).count())
            })
            .collect::<Result<Vec<_>>>()?;
        extra.push(counts);
    }
    let finite = extra.iter().all(|c| c[0] == c[1] && c[1] == c[2]);
    let w = Window::around(&g, 1 << 20);
    let m = meet(&a, &b)?.cached(&w)?;
    let zero = is_zero(&m, Mode::Coarse, &w, 10)?;
    if let Some(wit) = zero.witness.clone() {
        let (m, w) = (m.clone(), w.clone());
        certs.add(&zero, Box::new(move || revalidate::zero(&m, &wit, &w)));
    }
    let j = join(&a, &b)?.cached(&w)?;
    let unit = LevelFunction::unit(&g);
    let one = equivalent(&j, &unit, Mode::Coarse, &w, &Grid::default())?;
    if let Some(wit) = one.witness.clone() {
        let (j, u, w) = (j.clone(), unit.clone(), w.clone());
        certs.add(&one, Box::new(move || revalidate::equivalence(&j, &u, &wit, &w)));
    }
    let fb = FilterBase::tails(&g, set_a, 6);
    let taus = (tau(&fb, &a, &w, 8)?.value, tau(&fb, &b, &w, 8)?.value);
    let tau_ok = taus == (Some(true), Some(false));
    let sizes: Vec<usize> = extra.iter().map(|c| c[0]).collect();
    Ok(outcome(
        finite && zero.is_certified() && one.is_certified() && tau_ok,
        format!(
            "|N_k(A)∖A| for k=1..{EX2_K_MAX}: {sizes:?} stable={finite}; meet {} ; join {}; τ = {taus:?}",
            zero.label, one.label
        ),
    ))
}

fn c09(certs: &mut Certificates) -> Result<Outcome> {
    let (g, a, b) = geometric_pair();
    let w = Window::around(&g, 1 << 20);
    let gens = vec![a.cached(&w)?, b.cached(&w)?];
    let rep = algebra_report(&gens, &w)?;
    let mut nonzero = Vec::new();
    for entry in &rep.atoms {
        let v = &entry.verdict;
        if is_nonzero(v) {
            nonzero.push(entry.pattern.clone());
        }
        let (m, j) = atom_parts(&AtomPattern::parse(&entry.pattern)?, &gens)?;
        let mj = meet(&m, &j)?;
        if let Some(wit) = v.witness.clone() {
            let w = w.clone();
            let check: Check = if is_nonzero(v) {
                Box::new(move || revalidate::escape(&m, &mj, &wit))
            } else {
                Box::new(move || revalidate::equivalence(&m, &mj, &wit, &w))
            };
            certs.add(v, check);
        }
    }
    let mut hom_ok = true;
    for h in &rep.homs {
        hom_ok &= check_hom(h, &gens, &[(0, 1)], &w)?.passed;
    }
    let labels: Vec<String> = rep.atoms.iter().map(|e| format!("{}:{}", e.pattern, e.verdict.label)).collect();
    Ok(outcome(
        nonzero.len() == 3 && rep.homs.len() == 3 && hom_ok,
        format!(
            "atoms {labels:?}; {} nonzero, {} homs (all pass check_hom: {hom_ok}); expected 3 and 3",
            nonzero.len(),
            rep.homs.len()
        ),
    ))
}

fn c10() -> Result<Outcome> {
    let int = MetricSpace::IntLine;
    let mu = DensityMeasure::natural(&int);
    let unit = nu_hat(&mu, &LevelFunction::unit(&int), 16)?.interval.is_exactly(&q(1));
    let zero = nu_hat(&mu, &LevelFunction::zero(&int), 16)?.interval.is_exactly(&q(0));
    let neg = LevelFunction::from_subset(&int, named_set(&int, "nonpos")?);
    let pos = LevelFunction::from_subset(&int, named_set(&int, "nonneg")?);
    let ev = LevelFunction::from_subset(&int, named_set(&int, "evens")?);
    let half = nu_hat(&mu, &neg, 16)?.interval;
    let tol = qr(HALF_LINE_TOL.0, HALF_LINE_TOL.1);
    let half_ok = half.within(&(qr(1, 2) - tol), &(qr(1, 2) + tol));
    let mut modular = true;
    let mut complement = true;
    for (e, f) in [(&neg, &pos), (&neg, &ev), (&ev, &pos), (&neg, &neg)] {
        let r = check_modularity(&mu, e, f, 8)?;
        modular &= r.counts_exact && r.interval_ok;
        complement &= r.complement_ok;
    }
    let mut doubled = true;
    for e in [&neg, &pos, &ev] {
        doubled &= nu_bar(&mu, &[e.clone(), e.clone()], 8)?.is_exactly(&q(0));
    }
    Ok(outcome(
        unit && zero && half_ok && modular && complement && doubled,
        format!(
            "ν̂(1)=1: {unit}; ν̂(0)=0: {zero}; half-line [{}, {}]; modularity {modular}; ν̄(e,e)=0 {doubled}; complement {complement}",
            half.lo.0, half.hi.0
        ),
    ))
}

fn c11() -> Result<Outcome> {
    let nat = MetricSpace::NatLine;
    let sources = vec![
        LevelFunction::from_subset(&nat, named_set(&nat, "squares")?),
        LevelFunction::from_subset(&nat, named_set(&nat, "mult4")?),
        LevelFunction::from_subset(&nat, named_set(&nat, "powers2")?),
        LevelFunction::zero(&nat),
        LevelFunction::unit(&nat),
    ];
    let (mut au1, mut au2, mut bounded) = (true, true, 0);
    let mut strict = Vec::new();
    for e in sources.iter().take(RECOVERY_SOURCES) {
        let u = ApproximateUnit::new(e);
        for r in [16, 32, 64, 128] {
            let rep = check_au(&u, &Window::around(&nat, r), 6)?;
            au1 &= rep.range_ok && rep.au1_support && rep.au1_product;
            au2 &= rep.au2_relaxed;
            if r == 128 && rep.strict_violation_count > 0 {
                let first = rep.strict_violations.first().map(|(n, x, y)| format!("n={n} ({x},{y})"));
                strict.push(format!("{}: {} e.g. {}", e.name(), rep.strict_violation_count, first.unwrap_or_default()));
            }
        }
        if level_recovery(&u, &Window::around(&nat, 128))?.bounded {
            bounded += 1;
        }
    }
    Ok(outcome(
        au1 && au2 && bounded == RECOVERY_SOURCES,
        format!(
            "(au1) exact: {au1}; T(n) <= 2n+2 on {bounded}/{RECOVERY_SOURCES}; relaxed (au2): {au2}; strict (au2) violations: {}",
            if strict.is_empty() { "none".into() } else { strict.join("; ") }
        ),
    ))
}

fn c12(certs: &Certificates) -> Result<Outcome> {
    let mut failed = Vec::new();
    for (claim, check) in &certs.0 {
        let r = check()?;
        if !r.ok {
            failed.push(format!("{claim}: {}", r.failure.unwrap_or_default()));
        }
    }
    Ok(outcome(
        failed.is_empty() && !certs.0.is_empty(),
        format!("{}/{} certified verdicts re-validate{}", certs.0.len() - failed.len(), certs.0.len(), first(&failed)),
    ))
}

fn first<T: std::fmt::Debug>(v: &[T]) -> String {
    v.first().map_or(String::new(), |x| format!("; first: {x:?}"))
}

fn main() {
    let mut certs = Certificates::default();
    let mut all = true;
    let mut report = |id: &str, name: &str, start: Instant, r: Result<Outcome>| {
        let (pass, detail) = match r {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        all &= pass;
        println!(
            "{id} {name:<22} {} ({:.1}s) {detail}",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    };
    let t = Instant::now();
    report("c01", "metric-axioms", t, c01());
    let t = Instant::now();
    report("c02", "oracle-equivalence", t, c02());
    let t = Instant::now();
    report("c03", "level-sandwich", t, c03());
    let t = Instant::now();
    let r = c04(&mut certs);
    report("c04", "projection-criterion", t, r);
    let t = Instant::now();
    report("c05", "join-diagonal", t, c05());
    let t = Instant::now();
    report("c06", "lattice-laws", t, c06());
    let t = Instant::now();
    let r = c07(&mut certs);
    report("c07", "example-typeI", t, r);
    let t = Instant::now();
    let r = c08(&mut certs);
    report("c08", "example-ex2", t, r);
    let t = Instant::now();
    let r = c09(&mut certs);
    report("c09", "boolean-atoms", t, r);
    let t = Instant::now();
    report("c10", "measures", t, c10());
    let t = Instant::now();
    report("c11", "ideals", t, c11());
    let t = Instant::now();
    let r = c12(&certs);
    report("c12", "witness-revalidation", t, r);
    if !all {
        std::process::exit(1);
    }
}
