use coarse_double::catalog::named_set;
use coarse_double::double::{check_axioms, DeltaFn, DoubleMetric};
use coarse_double::par::{self, Mode};
use coarse_double::projection::LevelFunction;
use coarse_double::space::{MetricSpace, Window};
use criterion::{criterion_group, criterion_main, Criterion};

fn bench(c: &mut Criterion) {
    let nat = MetricSpace::NatLine;
    let e = LevelFunction::from_subset(&nat, named_set(&nat, "squares").unwrap());
    let d = DoubleMetric::delta(&nat, DeltaFn::Levels(e.clone()));
    let w_axioms = Window::around(&nat, 80);
    let w_levels = Window::around(&nat, 1024);
    let mut group = c.benchmark_group("modes");
    group.sample_size(10);
    for (label, mode) in [("sequential", Mode::Sequential), ("parallel", Mode::Parallel)] {
        group.bench_function(format!("check_axioms/{label}"), |b| {
            par::set_mode(mode);
            b.iter(|| check_axioms(&d, &w_axioms).unwrap())
        });
        group.bench_function(format!("tabulate/{label}"), |b| {
            par::set_mode(mode);
            b.iter(|| e.tabulate(&w_levels).unwrap())
        });
    }
    group.finish();
    par::set_mode(Mode::Parallel);
}

criterion_group!(benches, bench);
criterion_main!(benches);
