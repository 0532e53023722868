//! Finite Boolean fragment generated by projections: formal mod-2 sums, atoms,
//! two-valued homomorphisms, filter-base evaluations and separating sets.

use crate::asymptotics::{equivalent, escape, sweep_radii, Mode, ZERO_N_MAX};
use crate::error::{Error, Result};
use crate::projection::{join, meet, LevelFunction};
use crate::rational::{format_q, q, ExactQ};
use crate::space::{certified_dist_to_set, PointId, PointSet, Window, DEFAULT_SEARCH_CAP};
use crate::verdict::{Grid, Status, Verdict, Witness};
use crate::{par, Q};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Largest supported number of generators.
pub const MAX_GENERATORS: usize = 16;

/// Terms of the lattice generated by `e₁..e_k` together with `𝟎` and `𝟏`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LatticeTerm {
    Zero,
    Unit,
    Gen(usize),
    Meet(Box<LatticeTerm>, Box<LatticeTerm>),
    Join(Box<LatticeTerm>, Box<LatticeTerm>),
}

impl LatticeTerm {
    pub fn meet(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Join(Box::new(a), Box::new(b))
    }

    /// The level function this term denotes.
    pub fn realize(&self, gens: &[LevelFunction]) -> Result<LevelFunction> {
        let space = gens.first().ok_or_else(|| Error::domain("no generators"))?.space();
        Ok(match self {
            LatticeTerm::Zero => LevelFunction::zero(space),
            LatticeTerm::Unit => LevelFunction::unit(space),
            LatticeTerm::Gen(i) => gens.get(*i).cloned().ok_or_else(|| Error::domain(format!("no generator e{}", i + 1)))?,
            LatticeTerm::Meet(a, b) => meet(&a.realize(gens)?, &b.realize(gens)?)?,
            LatticeTerm::Join(a, b) => join(&a.realize(gens)?, &b.realize(gens)?)?,
        })
    }
}

/// A sum of lattice terms with coefficients in `Z/2`; `e + e = 0`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: BTreeSet<LatticeTerm>,
}

impl FormalSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(t: LatticeTerm) -> Self {
        let mut s = Self::default();
        s.add(t);
        s
    }

    /// Adds one term, cancelling it if already present.
    pub fn add(&mut self, t: LatticeTerm) -> &mut Self {
        if !self.terms.remove(&t) {
            self.terms.insert(t);
        }
        self
    }

    pub fn plus(&self, other: &FormalSum) -> FormalSum {
        FormalSum {
            terms: self.terms.symmetric_difference(&other.terms).cloned().collect(),
        }
    }

    /// `ē = 𝟏 + e`.
    pub fn complement(&self) -> FormalSum {
        self.plus(&FormalSum::term(LatticeTerm::Unit))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &LatticeTerm> {
        self.terms.iter()
    }
}

/// `S ⊆ {1..k}`: the atom `∧_{i∈S} e_i ∧ ∧_{j∉S} ē_j`, stored as membership flags.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomPattern(pub Vec<bool>);

impl AtomPattern {
    /// Pattern number `bits` of `k`, written with `e₁` as the leading digit.
    pub fn from_index(k: usize, bits: usize) -> Self {
        AtomPattern((0..k).map(|i| bits >> (k - 1 - i) & 1 == 1).collect())
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad atom pattern {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(AtomPattern)
    }
}

fn check_gens(gens: &[LevelFunction]) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::domain("no generators"));
    }
    if gens.len() > MAX_GENERATORS {
        return Err(Error::TooManyGenerators(gens.len()));
    }
    if gens.iter().any(|g| g.space() != gens[0].space()) {
        return Err(Error::domain("generators live on different spaces"));
    }
    Ok(())
}

/// Tests `m ⪯ j`: `nonzero` on escape evidence, otherwise `zero` when `m ~ m∧j` is
/// certified. Escape compares `R/4` with `R` and so sees sparse sets that gain no point
/// between `R/2` and `R`; it is therefore consulted first.
fn relative_zero(m: &LevelFunction, j: &LevelFunction, claim: String, w: &Window) -> Result<Verdict> {
    let mj = meet(m, j)?;
    let eq = equivalent(m, &mj, Mode::Coarse, w, &Grid::default())?;
    let mut v = match escape(m, &mj, w, ZERO_N_MAX)? {
        Some(wit) => Verdict::certified(claim, "nonzero", wit, w),
        None => match eq.witness {
            Some(wit) if eq.status == Status::CertifiedOnWindow => Verdict::certified(claim, "zero", wit, w),
            _ => Verdict::inconclusive(claim, "undetermined", w),
        },
    };
    v.diagnostics = eq.diagnostics;
    Ok(v)
}

/// The meet `M` over `S` and the join `J` over its complement.
pub fn atom_parts(s: &AtomPattern, gens: &[LevelFunction]) -> Result<(LevelFunction, LevelFunction)> {
    check_gens(gens)?;
    if s.0.len() != gens.len() {
        return Err(Error::domain("pattern length differs from the number of generators"));
    }
    let space = gens[0].space();
    let mut m: Option<LevelFunction> = None;
    let mut j: Option<LevelFunction> = None;
    for (g, inside) in gens.iter().zip(&s.0) {
        let slot = if *inside { &mut m } else { &mut j };
        *slot = Some(match slot.take() {
            None => g.clone(),
            Some(acc) if *inside => meet(&acc, g)?,
            Some(acc) => join(&acc, g)?,
        });
    }
    Ok((
        m.unwrap_or_else(|| LevelFunction::unit(space)),
        j.unwrap_or_else(|| LevelFunction::zero(space)),
    ))
}

/// The atom of `S` is nonzero iff `M ⪯ J` fails.
pub fn atom_nonzero(s: &AtomPattern, gens: &[LevelFunction], w: &Window) -> Result<Verdict> {
    let (m, j) = atom_parts(s, gens)?;
    relative_zero(&m, &j, format!("atom[{}] ≠ 0", s.label()), w)
}

pub fn is_nonzero(v: &Verdict) -> bool {
    v.is_certified() && v.label == "nonzero"
}

pub fn is_certified_zero(v: &Verdict) -> bool {
    v.is_certified() && v.label == "zero"
}

/// Verdicts for all `2^k` patterns, in binary order.
pub fn enumerate_atoms(gens: &[LevelFunction], w: &Window) -> Result<Vec<(AtomPattern, Verdict)>> {
    check_gens(gens)?;
    let k = gens.len();
    let cached = gens.iter().map(|g| g.cached(w)).collect::<Result<Vec<_>>>()?;
    let patterns: Vec<AtomPattern> = (0..1usize << k).map(|b| AtomPattern::from_index(k, b)).collect();
    let verdicts = par::try_map(&patterns, |s| atom_nonzero(s, &cached, w))?;
    Ok(patterns.into_iter().zip(verdicts).collect())
}

/// `φ_S(e_i) = 1` iff `i ∈ S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoValuedHom {
    pub generators: Vec<String>,
    pub assignment: Vec<bool>,
}

impl TwoValuedHom {
    pub fn from_pattern(s: &AtomPattern, gens: &[LevelFunction]) -> Self {
        TwoValuedHom {
            generators: gens.iter().map(|g| g.name().to_string()).collect(),
            assignment: s.0.clone(),
        }
    }

    pub fn pattern(&self) -> AtomPattern {
        AtomPattern(self.assignment.clone())
    }

    /// `φ` on a lattice term, by min/max with `φ(𝟎) = 0`, `φ(𝟏) = 1`.
    pub fn eval(&self, t: &LatticeTerm) -> Result<bool> {
        Ok(match t {
            LatticeTerm::Zero => false,
            LatticeTerm::Unit => true,
            LatticeTerm::Gen(i) => *self
                .assignment
                .get(*i)
                .ok_or_else(|| Error::domain(format!("e{} is not a generator of this homomorphism", i + 1)))?,
            LatticeTerm::Meet(a, b) => self.eval(a)? && self.eval(b)?,
            LatticeTerm::Join(a, b) => self.eval(a)? || self.eval(b)?,
        })
    }
}

/// One homomorphism per certified-nonzero atom.
pub fn homs(gens: &[LevelFunction], w: &Window) -> Result<Vec<TwoValuedHom>> {
    Ok(homs_from_atoms(&enumerate_atoms(gens, w)?, gens))
}

pub fn homs_from_atoms(atoms: &[(AtomPattern, Verdict)], gens: &[LevelFunction]) -> Vec<TwoValuedHom> {
    atoms
        .iter()
        .filter(|(_, v)| is_nonzero(v))
        .map(|(s, _)| TwoValuedHom::from_pattern(s, gens))
        .collect()
}

/// `φ̄(Σ tᵢ) = Σ φ(tᵢ) mod 2`.
pub fn extend_hom(phi: &TwoValuedHom, s: &FormalSum) -> Result<bool> {
    s.terms().try_fold(false, |acc, t| Ok(acc ^ phi.eval(t)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub passed: bool,
    pub checks: usize,
    pub violations: Vec<String>,
    /// Checks whose underlying zero test was inconclusive.
    pub undetermined: Vec<String>,
}

/// Checks unitality and meet/join compatibility of an assignment on the given pairs.
///
/// `φ(𝟏) = 1` needs the atom of the assignment to be nonzero. For a pair with
/// `φ(e) = φ(f) = 1` the meet must not be `𝟎`; with `φ(e) = φ(f) = 0` the join must not be `𝟏`.
pub fn check_hom(phi: &TwoValuedHom, gens: &[LevelFunction], pairs: &[(usize, usize)], w: &Window) -> Result<HomReport> {
    check_gens(gens)?;
    if phi.assignment.len() != gens.len() {
        return Err(Error::domain("assignment length differs from the number of generators"));
    }
    let space = gens[0].space();
    let (zero, unit) = (LevelFunction::zero(space), LevelFunction::unit(space));
    let mut rep = HomReport {
        passed: true,
        checks: 0,
        violations: Vec::new(),
        undetermined: Vec::new(),
    };
    let mut record = |v: &Verdict, bad_when_zero: bool, what: String| {
        rep.checks += 1;
        if v.status != Status::CertifiedOnWindow {
            rep.undetermined.push(what);
        } else if bad_when_zero == is_certified_zero(v) {
            rep.violations.push(what);
        }
    };
    let atom = atom_nonzero(&phi.pattern(), gens, w)?;
    record(&atom, true, format!("φ(1) = 0: atom[{}] is zero", phi.pattern().label()));
    for &(i, j) in pairs {
        if i >= gens.len() || j >= gens.len() {
            return Err(Error::domain(format!("pair ({}, {}) names a foreign generator", i + 1, j + 1)));
        }
        let (a, b) = (phi.assignment[i], phi.assignment[j]);
        if a && b {
            let m = meet(&gens[i], &gens[j])?;
            let v = relative_zero(&m, &zero, format!("e{}∧e{} ≠ 0", i + 1, j + 1), w)?;
            record(&v, true, format!("φ(e{0}∧e{1}) = φ(0) = 0 but min(φe{0}, φe{1}) = 1", i + 1, j + 1));
        } else if !a && !b {
            let jn = join(&gens[i], &gens[j])?;
            let v = relative_zero(&unit, &jn, format!("e{}∨e{} ≠ 1", i + 1, j + 1), w)?;
            record(&v, true, format!("φ(e{0}∨e{1}) = φ(1) = 1 but max(φe{0}, φe{1}) = 0", i + 1, j + 1));
        }
    }
    rep.passed = rep.violations.is_empty() && rep.undetermined.is_empty();
    Ok(rep)
}

/// JSON shape of an algebra report.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub generators: Vec<String>,
    pub atoms: Vec<AtomEntry>,
    pub homs: Vec<TwoValuedHom>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomEntry {
    pub pattern: String,
    pub verdict: Verdict,
}

pub fn algebra_report(gens: &[LevelFunction], w: &Window) -> Result<AlgebraReport> {
    let atoms = enumerate_atoms(gens, w)?;
    let homs = homs_from_atoms(&atoms, gens);
    Ok(AlgebraReport {
        generators: gens.iter().map(|g| g.name().to_string()).collect(),
        atoms: atoms
            .into_iter()
            .map(|(s, verdict)| AtomEntry {
                pattern: s.label(),
                verdict,
            })
            .collect(),
        homs,
    })
}

/// A decreasing chain `F₁ ⊇ F₂ ⊇ …` standing in for a free ultrafilter.
#[derive(Debug, Clone)]
pub struct FilterBase {
    pub name: String,
    pub sets: Vec<PointSet>,
}

impl FilterBase {
    /// `F_k = S ∖ B_{2^k}(x₀)` for `k = 1..=k_max`.
    pub fn tails(space: &crate::space::MetricSpace, s: PointSet, k_max: u32) -> Self {
        let x0 = space.basepoint();
        let sets = (1..=k_max)
            .map(|k| {
                let (sp, inner) = (space.clone(), s.clone());
                let r = q(1i64 << k);
                PointSet::fallible(format!("{}∖B_{}", s.name(), 1u64 << k), move |x| {
                    Ok(inner.contains(x)? && sp.distance(x, &x0)? > r)
                })
            })
            .collect();
        FilterBase {
            name: format!("tails({})", s.name()),
            sets,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauResult {
    /// `Some(true)` for 1, `Some(false)` for 0, `None` when undetermined.
    pub value: Option<bool>,
    pub witness: Option<Witness>,
    /// `|F_k ∩ A_n ∩ W|` at the full radius, rows `n = 1..`, columns `k = 1..`.
    pub matrix: Vec<Vec<usize>>,
}

/// `τ_F(e)`: 1 when some `F_k ∩ W` lies in some `A_n`; 0 when for each `n <= n_max`
/// some `F_k ∩ A_n` is finite and unchanged between the two outer radii of the sweep.
pub fn tau(f: &FilterBase, e: &LevelFunction, w: &Window, n_max: u64) -> Result<TauResult> {
    let t = e.tabulate(w)?;
    let radii = sweep_radii(w);
    let members: Vec<Vec<bool>> = f
        .sets
        .iter()
        .map(|s| t.points.iter().map(|p| s.contains(p)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let count = |k: usize, n: u64, r: &Q| {
        (0..t.len())
            .filter(|&i| members[k][i] && t.levels[i] <= n && t.base_dist[i] <= *r)
            .count()
    };
    let matrix: Vec<Vec<usize>> = (1..=n_max).map(|n| (0..f.sets.len()).map(|k| count(k, n, &w.radius)).collect()).collect();
    for n in 1..=n_max {
        for k in 0..f.sets.len() {
            let nonempty = members[k].iter().any(|m| *m);
            if nonempty && (0..t.len()).all(|i| !members[k][i] || t.levels[i] <= n) {
                return Ok(TauResult {
                    value: Some(true),
                    witness: Some(Witness::FilterInside { n, k: k as u64 + 1 }),
                    matrix,
                });
            }
        }
    }
    let finite = (1..=n_max).all(|n| {
        (0..f.sets.len()).any(|k| {
            let grows_meanwhile = (0..t.len()).any(|i| members[k][i] && t.base_dist[i] > radii[1]);
            count(k, n, &radii[1]) == count(k, n, &radii[2]) && grows_meanwhile
        })
    });
    Ok(TauResult {
        value: if finite { Some(false) } else { None },
        witness: None,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationPoint {
    pub n: u64,
    pub point: PointId,
    pub margin: ExactQ,
}

#[derive(Debug, Clone)]
pub struct Separation {
    pub points: Vec<SeparationPoint>,
    pub set: PointSet,
}

/// Greedy `B = {x_n}` with `d_X(x_n, A_n) > n`, moving outward from the basepoint.
pub fn separating_set(e: &LevelFunction, w: &Window) -> Result<Separation> {
    let s = e.space();
    let t = e.tabulate(w)?;
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by_key(|&i| (t.base_dist[i], t.points[i]));
    let cap = q(DEFAULT_SEARCH_CAP);
    let mut picked: Vec<SeparationPoint> = Vec::new();
    let mut pos = 0;
    let mut n = 1u64;
    'outer: loop {
        let an = e.sublevel_set(n);
        while pos < order.len() {
            let i = order[pos];
            pos += 1;
            if t.levels[i] <= n {
                continue;
            }
            let margin = match certified_dist_to_set(s, &t.points[i], &an, &cap) {
                Ok(d) => d,
                Err(Error::EmptySet { .. }) => cap,
                Err(other) => return Err(other),
            };
            if margin > q(n as i64) {
                picked.push(SeparationPoint {
                    n,
                    point: t.points[i],
                    margin: margin.into(),
                });
                n += 1;
                continue 'outer;
            }
        }
        break;
    }
    if picked.is_empty() {
        return Err(Error::inconclusive(
            format!("{}: no window point lies more than 1 away from A_1", e.name()),
            None,
        ));
    }
    let set = PointSet::explicit(format!("B[{}]", e.name()), picked.iter().map(|p| p.point));
    Ok(Separation { points: picked, set })
}

/// `|N_m(B) ∩ A_m ∩ W_r|` for each radius of the sweep and `m = 1..=m_max`.
pub fn separation_counts(e: &LevelFunction, sep: &Separation, w: &Window, m_max: u64) -> Result<Vec<[usize; 3]>> {
    let s = e.space();
    let t = e.tabulate(w)?;
    let radii = sweep_radii(w);
    (1..=m_max)
        .map(|m| {
            let mut out = [0usize; 3];
            for i in 0..t.len() {
                if t.levels[i] > m {
                    continue;
                }
                let near = sep.points.iter().any(|p| s.dist(&t.points[i], &p.point) <= q(m as i64));
                if near {
                    for (slot, r) in out.iter_mut().zip(&radii) {
                        if t.base_dist[i] <= *r {
                            *slot += 1;
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect()
}

pub fn describe_margin(p: &SeparationPoint) -> String {
    format!("n={} at {} (margin {})", p.n, p.point, format_q(&p.margin.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::MetricSpace;

    fn geom_pair() -> (MetricSpace, LevelFunction, LevelFunction) {
        let g = MetricSpace::GeomLine;
        let a = LevelFunction::from_subset(&g, PointSet::predicate("4^k", |x| x.x().trailing_zeros() % 2 == 0));
        let d = LevelFunction::from_subset(&g, PointSet::predicate("2*4^k", |x| x.x().trailing_zeros() % 2 == 1));
        (g, a, d)
    }

    #[test]
    fn formal_sums() {
        let e = LatticeTerm::Gen(0);
        let mut s = FormalSum::term(e.clone());
        s.add(e.clone());
        assert!(s.is_empty());
        let phi = TwoValuedHom {
            generators: vec!["e".into(), "f".into()],
            assignment: vec![true, false],
        };
        let c = FormalSum::term(e.clone()).complement();
        assert!(!extend_hom(&phi, &c).unwrap());
        let f = LatticeTerm::Gen(1);
        let mut rel = FormalSum::zero();
        rel.add(e.clone()).add(f.clone()).add(LatticeTerm::meet(e.clone(), f.clone())).add(LatticeTerm::join(e, f));
        for bits in 0..4 {
            let p = TwoValuedHom {
                generators: phi.generators.clone(),
                assignment: vec![bits & 2 != 0, bits & 1 != 0],
            };
            assert!(!extend_hom(&p, &rel).unwrap());
        }
        assert!(extend_hom(&phi, &FormalSum::term(LatticeTerm::Gen(5))).is_err());
    }

    #[test]
    fn unit_generator() {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 64);
        let atoms = enumerate_atoms(&[LevelFunction::unit(&nat)], &w).unwrap();
        assert!(is_certified_zero(&atoms[0].1));
        assert!(is_nonzero(&atoms[1].1));
        assert_eq!(homs_from_atoms(&atoms, &[LevelFunction::unit(&nat)]).len(), 1);
        let bad = TwoValuedHom {
            generators: vec!["1".into()],
            assignment: vec![false],
        };
        assert!(!check_hom(&bad, &[LevelFunction::unit(&nat)], &[], &w).unwrap().passed);
    }

    #[test]
    fn geometric_pair() {
        let (g, a, d) = geom_pair();
        let w = Window::around(&g, 1 << 20);
        let gens = [a.clone(), d.clone()];
        let atoms = enumerate_atoms(&gens, &w).unwrap();
        let labels: Vec<(String, String)> = atoms.iter().map(|(s, v)| (s.label(), v.label.clone())).collect();
        assert_eq!(labels[3], ("11".into(), "zero".into()));
        assert_eq!(labels[2], ("10".into(), "nonzero".into()));
        assert_eq!(labels[1], ("01".into(), "nonzero".into()));
        let both = TwoValuedHom {
            generators: vec![],
            assignment: vec![true, true],
        };
        assert!(!check_hom(&both, &gens, &[(0, 1)], &w).unwrap().passed);
        for h in homs_from_atoms(&atoms, &gens) {
            assert!(check_hom(&h, &gens, &[(0, 1)], &w).unwrap().passed);
        }
        let dup = enumerate_atoms(&[a.clone(), a.clone()], &w).unwrap();
        let realized: Vec<String> = dup.iter().filter(|(_, v)| is_nonzero(v)).map(|(s, _)| s.label()).collect();
        assert!(realized.iter().all(|l| l == "11" || l == "00"));
        assert!(realized.contains(&"11".to_string()));
    }

    #[test]
    fn tau_values() {
        let (g, a, d) = geom_pair();
        let w = Window::around(&g, 1 << 20);
        let f = FilterBase::tails(&g, PointSet::predicate("4^j", |x| x.x().trailing_zeros() % 2 == 0), 6);
        assert_eq!(tau(&f, &a, &w, 8).unwrap().value, Some(true));
        assert_eq!(tau(&f, &d, &w, 8).unwrap().value, Some(false));
        assert_eq!(tau(&f, &LevelFunction::unit(&g), &w, 8).unwrap().value, Some(true));
    }

    #[test]
    fn separation() {
        let (g, a, _) = geom_pair();
        let sep = separating_set(&a, &Window::around(&g, 1 << 12)).unwrap();
        assert!(sep.points.len() >= 3);
        for p in &sep.points {
            assert!(p.margin.0 > q(p.n as i64));
            assert_eq!(p.point.x().trailing_zeros() % 2, 1, "{}", describe_margin(p));
        }
        let nat = MetricSpace::NatLine;
        let z = LevelFunction::zero(&nat);
        let sep = separating_set(&z, &Window::around(&nat, 64)).unwrap();
        assert!(sep.points.len() > 10);
        let counts = separation_counts(&z, &sep, &Window::around(&nat, 64), 4).unwrap();
        assert!(counts.iter().all(|c| c[1] == c[2]));
    }
}
