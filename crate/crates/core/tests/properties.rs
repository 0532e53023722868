use coarse_double::catalog::named_set;
use coarse_double::double::{DeltaFn, DoubleMetric, Scope};
use coarse_double::expr::Expr;
use coarse_double::par;
use coarse_double::projection::{join, meet, LevelFunction};
use coarse_double::rational::q;
use coarse_double::space::{window_points, MetricSpace, PointId, Window};
use proptest::prelude::*;

fn generators(nat: &MetricSpace) -> Vec<LevelFunction> {
    let mut v = vec![LevelFunction::unit(nat), LevelFunction::zero(nat)];
    for name in ["evens", "squares", "powers2", "mult4"] {
        v.push(LevelFunction::from_subset(nat, named_set(nat, name).unwrap()));
    }
    for src in ["floor(x/3)", "x - 5*floor(x/5)", "abs(x - 7)"] {
        v.push(LevelFunction::from_expr(nat, Expr::parse(src).unwrap()));
    }
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lattice_laws(i in 0usize..9, j in 0usize..9, k in 0usize..9, x in 0i64..200) {
        let nat = MetricSpace::NatLine;
        let g = generators(&nat);
        let (a, b, c) = (&g[i], &g[j], &g[k]);
        let p = PointId::p1(x);
        let at = |e: &LevelFunction| e.level(&p).unwrap();
        prop_assert_eq!(at(&meet(a, b).unwrap()), at(&meet(b, a).unwrap()));
        prop_assert_eq!(at(&join(a, b).unwrap()), at(&join(b, a).unwrap()));
        prop_assert_eq!(at(&meet(&meet(a, b).unwrap(), c).unwrap()), at(&meet(a, &meet(b, c).unwrap()).unwrap()));
        prop_assert_eq!(at(&join(&join(a, b).unwrap(), c).unwrap()), at(&join(a, &join(b, c).unwrap()).unwrap()));
        prop_assert_eq!(at(&meet(a, &join(a, b).unwrap()).unwrap()), at(a));
        prop_assert_eq!(at(&join(a, &meet(a, b).unwrap()).unwrap()), at(a));
        prop_assert_eq!(at(&meet(a, a).unwrap()), at(a));
        prop_assert_eq!(
            at(&meet(a, &join(b, c).unwrap()).unwrap()),
            at(&join(&meet(a, b).unwrap(), &meet(a, c).unwrap()).unwrap())
        );
    }

    #[test]
    fn window_eval_matches_brute_force(c in 1i64..6, shift in 0i64..5, x in 0i64..40, y in 0i64..40) {
        let nat = MetricSpace::NatLine;
        let w = Window::around(&nat, 40);
        let d1 = DoubleMetric::delta(&nat, DeltaFn::Const(q(c)));
        let d2 = DoubleMetric::delta(&nat, DeltaFn::Expr(Expr::parse(&format!("abs(x - {}) + 1", 10 * shift)).unwrap()));
        let z = DoubleMetric::zero_at(&nat, PointId::p1(shift)).unwrap();
        let kernels = [
            d1.clone(),
            DoubleMetric::compose(&d1, &z).unwrap(),
            DoubleMetric::min_glue(&d1, &d2).unwrap(),
            DoubleMetric::pointwise_max(&d2, &z).unwrap(),
        ];
        let (x, y) = (PointId::p1(x), PointId::p1(y));
        for d in &kernels {
            let pruned = d.eval(&x, &y, Scope::Window(&w)).unwrap();
            prop_assert_eq!(pruned.value, d.brute_force(&x, &y, &w).unwrap(), "{}", d.name());
            if pruned.exact {
                prop_assert_eq!(pruned.value, d.eval(&x, &y, Scope::Free).unwrap().value);
            }
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let nat = MetricSpace::NatLine;
    let w = Window::around(&nat, 300);
    let e = LevelFunction::from_subset(&nat, named_set(&nat, "squares").unwrap());
    let d = DoubleMetric::delta(&nat, DeltaFn::Levels(e.clone()));
    let run = |mode| {
        par::set_mode(mode);
        let t = e.tabulate(&w).unwrap();
        let pts = window_points(&nat, &w).unwrap();
        let diag = par::map(&pts, |x| d.eval(x, x, Scope::Window(&w)).unwrap().value);
        (t.levels, diag)
    };
    let seq = run(par::Mode::Sequential);
    let parl = run(par::Mode::Parallel);
    par::set_mode(par::Mode::Parallel);
    assert_eq!(seq, parl);
}
