use crate::report::RunReport;
use crate::scenario::{run_scenario, ScenarioSpec, NAMES};
use crate::*;
use coarse_double::asymptotics::{equivalent, is_zero, sweep_radii, Mode};
use coarse_double::boolean::{algebra_report, check_hom, tau, FilterBase};
use coarse_double::catalog::{named_set, parse_kernel, parse_level, parse_point, SET_NAMES};
use coarse_double::double::{is_selfadjoint, DoubleMetric, Scope};
use coarse_double::error::{Error, Result};
use coarse_double::expr::Expr;
use coarse_double::ideals::{check_au, level_recovery, ApproximateUnit};
use coarse_double::measure::{check_modularity, default_schedule, measure0_check, nu_bar, nu_hat, DensityKind, DensityMeasure};
use coarse_double::projection::{
    classify_sweep, classify_type, join, meet, metric_from_levels, projection_criterion, validate_levels, LevelFunction, TypeParams,
};
use coarse_double::rational::format_q;
use coarse_double::space::{window_points, CustomSpace, MetricSpace, Window};
use coarse_double::verdict::Grid;
use std::path::Path;

const DEFAULT_N_MAX: u64 = 10;
const PREVIEW: usize = 16;

struct Ctx {
    space: MetricSpace,
    radius: Option<i64>,
    n_max: u64,
    grid: Grid,
}

impl Ctx {
    fn new(g: &Global) -> Result<Self> {
        let cfg: Config = match &g.config {
            Some(p) => serde_json::from_str(&read(p)?)?,
            None => Config::default(),
        };
        let space = match (&g.space_file, g.space.as_ref().or(cfg.space.as_ref())) {
            (Some(p), _) => MetricSpace::Custom(std::sync::Arc::new(CustomSpace::from_json(&read(p)?)?)),
            (None, Some(name)) => MetricSpace::by_name(name)?,
            (None, None) => MetricSpace::NatLine,
        };
        let defaults = Grid::default();
        Ok(Ctx {
            space,
            radius: g.radius.or(cfg.radius),
            n_max: g.n_max.or(cfg.n_max).unwrap_or(DEFAULT_N_MAX),
            grid: Grid {
                alpha_max: cfg.alpha_max.unwrap_or(defaults.alpha_max),
                beta_max: cfg.beta_max.unwrap_or(defaults.beta_max),
            },
        })
    }

    fn default_radius(&self) -> i64 {
        match &self.space {
            MetricSpace::NatLine | MetricSpace::IntLine => 256,
            MetricSpace::GeomLine => 1 << 20,
            MetricSpace::TwoTails(_) => 420,
            MetricSpace::Custom(c) => {
                let b = self.space.basepoint();
                c.points().iter().filter_map(|p| self.space.distance(&b, p).ok()).map(|d| d.ceil().to_integer()).max().unwrap_or(0)
            }
        }
    }

    fn window(&self) -> Window {
        Window::around(&self.space, self.radius.unwrap_or_else(|| self.default_radius()))
    }

    fn level(&self, spec: &str) -> Result<LevelFunction> {
        match spec.strip_prefix('@') {
            Some(path) => LevelFunction::from_json(&self.space, &read(Path::new(path))?),
            None => parse_level(&self.space, spec),
        }
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("cannot read {}: {e}", p.display())))
}

/// The command line echoed into the report, without the program name.
fn echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

pub fn run(cli: &Cli) -> Result<RunReport> {
    let ctx = Ctx::new(&cli.global)?;
    let mut r = RunReport::new(echo());
    match &cli.cmd {
        Command::Space { cmd } => space(&ctx, cmd, &mut r)?,
        Command::Proj {
            cmd: ProjCmd::Define { from_subset, levels, expr, save },
        } => {
            let e = match (from_subset, levels, expr) {
                (Some(s), _, _) => LevelFunction::from_subset(&ctx.space, named_set(&ctx.space, s)?),
                (_, Some(l), _) => ctx.level(l)?,
                (_, _, Some(x)) => LevelFunction::from_expr(&ctx.space, Expr::parse(x)?),
                _ => return Err(Error::Parse("give one of --from-subset, --levels, --expr".into())),
            };
            let w = ctx.window();
            let t = e.tabulate(&w)?;
            r.put("projection", e.name());
            r.put("validation", validate_levels(&e, &w)?);
            r.put("levels", preview(t.points.iter().zip(&t.levels).map(|(p, l)| (p.to_string(), *l))));
            r.verdict(projection_criterion(&metric_from_levels(&e), &w, &ctx.grid)?);
            if let Some(path) = save {
                std::fs::write(path, e.to_json(&w)? + "\n").map_err(|err| Error::Parse(format!("cannot write {}: {err}", path.display())))?;
            }
        }
        Command::Eval { metric, x, y } => {
            let d = parse_kernel(&ctx.space, metric)?;
            let (x, y) = (parse_point(x)?, parse_point(y)?);
            let v = match ctx.radius {
                Some(_) => d.eval(&x, &y, Scope::Window(&ctx.window()))?,
                None => d.eval(&x, &y, Scope::Free)?,
            };
            r.put("kernel", d.name());
            r.put("value", format_q(&v.value));
            r.put("exact", v.exact);
        }
        Command::Compare { e1, e2, mode } => {
            let w = ctx.window();
            let (a, b) = (ctx.level(e1)?.cached(&w)?, ctx.level(e2)?.cached(&w)?);
            for m in [Mode::Quasi, Mode::Coarse] {
                let wanted = matches!((mode, m), (CompareMode::Both, _) | (CompareMode::Quasi, Mode::Quasi) | (CompareMode::Coarse, Mode::Coarse));
                if wanted {
                    r.verdict(equivalent(&a, &b, m, &w, &ctx.grid)?);
                }
            }
        }
        Command::Product { left, right, x, y } => {
            let (d1, d2) = (parse_kernel(&ctx.space, left)?, parse_kernel(&ctx.space, right)?);
            let c = DoubleMetric::compose(&d1, &d2)?;
            let w = ctx.window();
            r.put("kernel", c.name());
            if let (Some(x), Some(y)) = (x, y) {
                let (x, y) = (parse_point(x)?, parse_point(y)?);
                r.put("value", format_q(&c.brute_force(&x, &y, &w)?));
            }
            if is_selfadjoint(&c, &w)? {
                r.verdict(projection_criterion(&c, &w, &ctx.grid)?);
            } else {
                r.put("selfadjoint", false);
            }
            let e = LevelFunction::from_metric(&c);
            r.verdict(classify_sweep(&e, &sweep_radii(&w), TypeParams::default())?);
        }
        Command::Meet { e1, e2 } => {
            let w = ctx.window();
            let m = meet(&ctx.level(e1)?, &ctx.level(e2)?)?.cached(&w)?;
            levels_preview(&m, &w, &mut r)?;
            r.verdict(is_zero(&m, Mode::Coarse, &w, ctx.n_max)?);
        }
        Command::Join { e1, e2 } => {
            let w = ctx.window();
            let j = join(&ctx.level(e1)?, &ctx.level(e2)?)?.cached(&w)?;
            levels_preview(&j, &w, &mut r)?;
            r.verdict(equivalent(&j, &LevelFunction::unit(&ctx.space), Mode::Coarse, &w, &ctx.grid)?);
        }
        Command::Classify { e, sweep } => {
            let w = ctx.window();
            let e = ctx.level(e)?;
            r.verdict(if *sweep {
                classify_sweep(&e, &sweep_radii(&w), TypeParams::default())?
            } else {
                classify_type(&e, &w, TypeParams::default())?
            });
        }
        Command::Algebra { generators, action } => {
            let w = ctx.window();
            let gens = generators.iter().map(|g| ctx.level(g)?.cached(&w)).collect::<Result<Vec<_>>>()?;
            let rep = algebra_report(&gens, &w)?;
            match action {
                AlgebraAction::Atoms => {
                    r.put("generators", &rep.generators);
                    r.put("atoms", rep.atoms.iter().map(|a| (a.pattern.clone(), a.verdict.label.clone())).collect::<Vec<_>>());
                    for a in rep.atoms {
                        r.verdict(a.verdict);
                    }
                }
                AlgebraAction::Homs => {
                    let pairs: Vec<(usize, usize)> =
                        (0..gens.len()).flat_map(|i| (i + 1..gens.len()).map(move |j| (i, j))).collect();
                    let mut checked = Vec::new();
                    for h in &rep.homs {
                        let c = check_hom(h, &gens, &pairs, &w)?;
                        checked.push(serde_json::json!({ "pattern": h.pattern().label(), "check": c }));
                    }
                    r.put("generators", &rep.generators);
                    r.put("homs", checked);
                }
            }
        }
        Command::Tau { e, filter_base, k_max } => {
            let w = ctx.window();
            let fb = FilterBase::tails(&ctx.space, named_set(&ctx.space, filter_base)?, *k_max);
            let res = tau(&fb, &ctx.level(e)?, &w, ctx.n_max)?;
            r.put("filter_base", &fb.name);
            r.put("tau", res.value.map_or("undetermined".to_string(), |b| (b as u8).to_string()));
            r.put("detail", &res);
        }
        Command::Measure { cmd } => measure(&ctx, cmd, &mut r)?,
        Command::Ideal { cmd: IdealCmd::Check { e } } => {
            let w = ctx.window();
            let u = ApproximateUnit::new(&ctx.level(e)?.cached(&w)?);
            let au = check_au(&u, &w, ctx.n_max)?;
            r.put("au_passed", au.passed());
            r.put("au", &au);
            r.put("recovery", level_recovery(&u, &w)?);
        }
        Command::Scenario { cmd } => match cmd {
            ScenarioCmd::List => r.put("scenarios", NAMES),
            ScenarioCmd::Run { name, expected } => {
                let mut spec = ScenarioSpec::builtin(name)?;
                if let Some(p) = expected {
                    spec = serde_json::from_str(&read(p)?)?;
                    if spec.name != *name {
                        return Err(Error::Parse(format!("{} describes scenario {}, not {name}", p.display(), spec.name)));
                    }
                }
                let mut out = run_scenario(&spec)?;
                out.command = r.command.clone();
                r = out;
            }
        },
        Command::Report { .. } => unreachable!("handled before dispatch"),
    }
    Ok(r)
}

fn preview<T: serde::Serialize>(items: impl Iterator<Item = T>) -> Vec<T> {
    items.take(PREVIEW).collect()
}

fn levels_preview(e: &LevelFunction, w: &Window, r: &mut RunReport) -> Result<()> {
    let t = e.tabulate(w)?;
    r.put("projection", e.name());
    r.put("levels", preview(t.points.iter().zip(&t.levels).map(|(p, l)| (p.to_string(), *l))));
    Ok(())
}

fn space(ctx: &Ctx, cmd: &SpaceCmd, r: &mut RunReport) -> Result<()> {
    match cmd {
        SpaceCmd::List => {
            r.put("spaces", MetricSpace::builtin_names());
            r.put("sets", SET_NAMES);
        }
        SpaceCmd::Show => {
            let w = ctx.window();
            let pts = window_points(&ctx.space, &w)?;
            r.put("space", ctx.space.name());
            r.put("basepoint", ctx.space.basepoint().to_string());
            r.put("min_gap", format_q(&ctx.space.min_gap()));
            r.put("radius", format_q(&w.radius));
            r.put("window_points", pts.len());
            r.put("first_points", preview(pts.iter().map(|p| p.to_string())));
        }
    }
    Ok(())
}

fn density(ctx: &Ctx, kind: DensityChoice) -> Result<DensityMeasure> {
    let k = match kind {
        DensityChoice::Ball => DensityKind::Ball,
        DensityChoice::Shell => DensityKind::Shell,
    };
    DensityMeasure::new(&ctx.space, k, default_schedule())
}

fn measure(ctx: &Ctx, cmd: &MeasureCmd, r: &mut RunReport) -> Result<()> {
    match cmd {
        MeasureCmd::NuHat { e, kind } => {
            let mu = density(ctx, *kind)?;
            let v = nu_hat(&mu, &ctx.level(e)?, ctx.n_max)?;
            r.put("interval", format!("[{}, {}]", format_q(&v.interval.lo.0), format_q(&v.interval.hi.0)));
            r.put("nu_hat", &v);
        }
        MeasureCmd::NuBar { gens, kind } => {
            let mu = density(ctx, *kind)?;
            let gens = gens.iter().map(|g| ctx.level(g)).collect::<Result<Vec<_>>>()?;
            let v = nu_bar(&mu, &gens, ctx.n_max)?;
            r.put("interval", format!("[{}, {}]", format_q(&v.lo.0), format_q(&v.hi.0)));
            r.put("nu_bar", &v);
        }
        MeasureCmd::Laws { e, f, kind } => {
            let mu = density(ctx, *kind)?;
            let (e, f) = (ctx.level(e)?, ctx.level(f)?);
            let m = check_modularity(&mu, &e, &f, ctx.n_max)?;
            r.put("laws_passed", m.passed());
            r.put("modularity", &m);
            r.put("measure0", measure0_check(&mu, &e, ctx.n_max)?);
        }
    }
    Ok(())
}

/// `report FILE [--json|--csv]`: reload a saved report and render it again.
pub fn rerender(file: &Path, json: bool, csv: bool) -> u8 {
    let parsed = read(file).map_err(|e| e.to_string()).and_then(|t| RunReport::from_json(&t).map_err(|e| e.to_string()));
    let rep = match parsed {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if rep.schema != report::SCHEMA {
        eprintln!("error: unsupported schema {:?} (expected {})", rep.schema, report::SCHEMA);
        return EXIT_USAGE;
    }
    if csv {
        print!("{}", rep.to_csv());
    } else if json {
        println!("{}", rep.to_json());
    } else {
        print!("{}", rep.to_text());
    }
    EXIT_OK
}
