//! The `dbcat` command line. [`run`] does all the work and returns the exit
//! code with the text to print, so it can be driven from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::category::{self, compose, factorize, invert, is_epi, is_iso, is_mono, lift_t, skeletalize, Morphism};
use crate::closure::{self, Bound, ClosedSet};
use crate::equations::{self, EquationSystem};
use crate::error::{Error, Result};
use crate::gen;
use crate::kleisli::{self, LawResult};
use crate::query::{self, parse_term};
use crate::relcore::{parse_dbi, Instance};
use crate::rewrite;

#[derive(Parser, Debug)]
#[command(name = "dbcat", about = "Database instances, view-map morphisms and the power-view closure")]
struct Cli {
    /// Largest arity of any view in a closure.
    #[arg(long, global = true, default_value_t = 2)]
    max_arity: usize,
    /// Give up when a closure grows past this many views.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_views: usize,
    /// Seed for randomized law suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Db {
    /// Instance file (.dbi).
    #[arg(long)]
    db: PathBuf,
}

#[derive(Args, Debug)]
struct Pair {
    #[arg(long)]
    db: PathBuf,
    /// Second instance file (.dbi).
    #[arg(long)]
    other: PathBuf,
}

#[derive(Args, Debug)]
struct Arrow {
    /// Source instance (.dbi).
    #[arg(long)]
    src: PathBuf,
    /// Target instance (.dbi).
    #[arg(long)]
    tgt: PathBuf,
    /// View-maps (.maps), read over the source.
    #[arg(long)]
    maps: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a query term over an instance.
    Eval {
        #[command(flatten)]
        db: Db,
        #[arg(long)]
        query: String,
    },
    /// List the closure of an instance with a witness for each view.
    Closure(Db),
    /// Behavioral equivalence: equal closures.
    Equiv(Pair),
    /// Closure inclusion in both directions.
    Order(Pair),
    /// Views common to both closures.
    Match(Pair),
    /// Closure of the union of both instances.
    Merge(Pair),
    /// Build a morphism and report its flux and properties.
    Morphism(Arrow),
    /// Compose `g: B -> C` after `f: A -> B`.
    Compose {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        mid: PathBuf,
        #[arg(long)]
        tgt: PathBuf,
        /// Maps of `f`, over the source.
        #[arg(long)]
        maps: PathBuf,
        /// Maps of `g`, over the middle instance.
        #[arg(long)]
        maps2: PathBuf,
    },
    /// The dual arrow, from target back to source.
    Invert(Arrow),
    /// Epi-mono factorization through the flux.
    Factorize(Arrow),
    /// The arrow between the closures of the endpoints.
    Lift(Arrow),
    /// The total function on the source closure.
    Skeletal(Arrow),
    /// Kleisli laws for the program `η ∘ f`.
    Kleisli(Arrow),
    /// Monad and comonad laws, on one instance or on random ones.
    Laws {
        #[arg(long)]
        db: Option<PathBuf>,
        /// Random instances to check when no instance is given.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Rewrite a query over the source into one over the target.
    Rewrite {
        #[command(flatten)]
        arrow: Arrow,
        #[arg(long)]
        query: String,
    },
    /// Solve a guarded equation system.
    Solve {
        #[command(flatten)]
        db: Db,
        #[arg(long)]
        eqs: PathBuf,
        #[arg(long)]
        var: Option<String>,
    },
    /// Flatten an equation system into single query terms.
    Flatten {
        #[arg(long)]
        eqs: PathBuf,
        #[arg(long)]
        var: Option<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "db".into(), |s| s.to_string_lossy().into_owned())
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_dbi(&stem(path), &read(path)?)
}

pub fn load_maps(path: &Path, src: &Arc<Instance>, tgt: &Arc<Instance>, bound: Bound) -> Result<Morphism> {
    let maps = category::parse_maps(&read(path)?, src)?;
    category::make_morphism(src.clone(), tgt.clone(), maps, bound)
}

pub fn load_eqs(path: &Path) -> Result<EquationSystem> {
    equations::parse_system(&read(path)?)
}

fn load_arrow(a: &Arrow, bound: Bound) -> Result<Morphism> {
    let src = Arc::new(load_instance(&a.src)?);
    let tgt = Arc::new(load_instance(&a.tgt)?);
    load_maps(&a.maps, &src, &tgt, bound)
}

fn views_report(s: &ClosedSet) -> String {
    let mut out = String::new();
    for v in s.views() {
        let _ = writeln!(out, "arity={} tuples={}", v.arity(), v.tuples_text());
    }
    out
}

fn arrow_report(f: &Morphism) -> Result<String> {
    let mut out = String::new();
    let _ = write!(out, "ARROW {f}");
    let _ = writeln!(out, "FLUX {} views", f.flux().len());
    out.push_str(&views_report(f.flux()));
    let _ = writeln!(out, "EPI {}", is_epi(f)?);
    let _ = writeln!(out, "MONO {}", is_mono(f)?);
    let _ = writeln!(out, "ISO {}", is_iso(f)?);
    Ok(out)
}

fn laws_report(laws: &[LawResult]) -> (bool, String) {
    let mut out = String::new();
    for l in laws {
        let _ = writeln!(out, "{l}");
        if !l.pass {
            for line in l.detail.lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
    }
    (laws.iter().all(|l| l.pass), out)
}

enum Report {
    Ok(String),
    /// A completed report whose verdict is negative.
    Fail(String),
}

fn execute(cli: &Cli) -> Result<Report> {
    let bound = Bound::new(cli.max_arity).with_max_views(cli.max_views);
    let text = match &cli.command {
        Command::Eval { db, query } => {
            let a = load_instance(&db.db)?;
            let v = query::eval(&parse_term(query)?, &a)?;
            format!("arity={} tuples={}\n", v.arity(), v.tuples_text())
        }
        Command::Closure(db) => closure::closure(&load_instance(&db.db)?, bound)?.report(),
        Command::Equiv(p) => {
            let (a, b) = (load_instance(&p.db)?, load_instance(&p.other)?);
            format!("EQUIV {}\n", closure::equiv(&a, &b, bound)?)
        }
        Command::Order(p) => {
            let (a, b) = (load_instance(&p.db)?, load_instance(&p.other)?);
            format!(
                "LEQ {}\nGEQ {}\n",
                closure::leq(&a, &b, bound)?,
                closure::leq(&b, &a, bound)?
            )
        }
        Command::Match(p) => {
            let (a, b) = (load_instance(&p.db)?, load_instance(&p.other)?);
            closure::match_op(&a, &b, bound)?.report()
        }
        Command::Merge(p) => {
            let (a, b) = (load_instance(&p.db)?, load_instance(&p.other)?);
            closure::merge_op(&a, &b, bound)?.report()
        }
        Command::Morphism(a) => arrow_report(&load_arrow(a, bound)?)?,
        Command::Compose {
            src,
            mid,
            tgt,
            maps,
            maps2,
        } => {
            let (a, b, c) = (
                Arc::new(load_instance(src)?),
                Arc::new(load_instance(mid)?),
                Arc::new(load_instance(tgt)?),
            );
            let f = load_maps(maps, &a, &b, bound)?;
            let g = load_maps(maps2, &b, &c, bound)?;
            arrow_report(&compose(&g, &f)?)?
        }
        Command::Invert(a) => arrow_report(&invert(&load_arrow(a, bound)?)?)?,
        Command::Factorize(a) => {
            let fac = factorize(&load_arrow(a, bound)?)?;
            format!(
                "MIDDLE\n{}EPI-PART {}MONO-PART {}",
                fac.mid.to_dbi(),
                arrow_report(&fac.epi)?,
                arrow_report(&fac.mono)?
            )
        }
        Command::Lift(a) => {
            let f = load_arrow(a, bound)?;
            let tf = lift_t(&f)?;
            format!(
                "LIFT {} -> {} with {} maps\nFLUX {} views\nEPI {} {}\nMONO {} {}\nISO {} {}\n",
                tf.src().name(),
                tf.tgt().name(),
                tf.maps().len(),
                tf.flux().len(),
                is_epi(&f)?,
                is_epi(&tf)?,
                is_mono(&f)?,
                is_mono(&tf)?,
                is_iso(&f)?,
                is_iso(&tf)?
            )
        }
        Command::Skeletal(a) => {
            let map = skeletalize(&load_arrow(a, bound)?)?;
            let mut out = String::new();
            for (from, to) in &map {
                let _ = writeln!(out, "{from} -> {to}");
            }
            out
        }
        Command::Kleisli(a) => {
            let f = load_arrow(a, bound)?;
            let (e, _) = category::eta(f.tgt().clone(), bound)?;
            let program = kleisli::theta(&compose(&e, &f)?, f.tgt().clone())?;
            let id = kleisli::kleisli_identity(f.tgt().clone(), bound)?;
            let mut laws = kleisli::check_computation_arrow(&f)?;
            laws.extend(kleisli::check_kleisli_laws(&program, &id)?);
            let (ok, text) = laws_report(&laws);
            return Ok(if ok { Report::Ok(text) } else { Report::Fail(text) });
        }
        Command::Laws { db, count } => {
            let laws = match db {
                Some(path) => kleisli::check_monad_laws(&load_instance(path)?, bound)?,
                None => random_laws(cli.seed, *count, bound)?,
            };
            let (ok, text) = laws_report(&laws);
            return Ok(if ok { Report::Ok(text) } else { Report::Fail(text) });
        }
        Command::Rewrite { arrow, query } => {
            let f = load_arrow(arrow, bound)?;
            let q = parse_term(query)?;
            return Ok(match rewrite::rewrite(&f, &q) {
                Ok(r) => Report::Ok(format!("REWRITTEN: {}\n", r.rewritten)),
                Err(e @ Error::NotRewritable(_)) => Report::Fail(format!("NOT-REWRITABLE\nERROR {}: {e}\n", e.code())),
                Err(e @ Error::WitnessNotFound { bound, .. }) => {
                    Report::Fail(format!("NO-WITNESS-AT-BOUND {bound}\nERROR {}: {e}\n", e.code()))
                }
                Err(e) => return Err(e),
            });
        }
        Command::Solve { db, eqs, var } => {
            let a = load_instance(&db.db)?;
            let sys = load_eqs(eqs)?;
            let order = equations::check_guarded(&sys, &a)?;
            let sol = equations::solve(&sys, &a)?;
            let vars = match var {
                Some(v) => vec![v.clone()],
                None => order,
            };
            let mut out = String::new();
            for v in vars {
                let line = sol.report(&v).ok_or_else(|| Error::UndeclaredVariable(v.clone()))?;
                out.push_str(&line);
                out.push('\n');
            }
            out
        }
        Command::Flatten { eqs, var } => {
            let sys = load_eqs(eqs)?;
            let vars: Vec<String> = match var {
                Some(v) => vec![v.clone()],
                None => sys.vars().map(String::from).collect(),
            };
            let mut out = String::new();
            for v in vars {
                let _ = writeln!(out, "{v}: {}", equations::as_query(&sys, &v)?);
            }
            out
        }
    };
    Ok(Report::Ok(text))
}

/// Monad laws on `count` random instances, and Kleisli and computation-arrow
/// laws on random arrows out of them. A law passes when it holds everywhere.
fn random_laws(seed: u64, count: usize, bound: Bound) -> Result<Vec<LawResult>> {
    let mut merged: Vec<LawResult> = Vec::new();
    let mut fold = |laws: Vec<LawResult>| {
        for l in laws {
            match merged.iter_mut().find(|m| m.name == l.name) {
                Some(m) if m.pass && !l.pass => *m = l,
                Some(_) => {}
                None => merged.push(l),
            }
        }
    };
    let mut rng = gen::rng(seed);
    for _ in 0..count {
        let a = Arc::new(gen::random_instance(&mut rng, "A"));
        fold(kleisli::check_monad_laws(&a, bound)?);
        let f = gen::random_morphism(&mut rng, &a, "B", bound)?;
        fold(kleisli::check_computation_arrow(&f)?);
        let g = gen::random_morphism(&mut rng, f.tgt(), "C", bound)?;
        let lift = |m: &Morphism| -> Result<kleisli::KleisliArrow> {
            let (e, _) = category::eta(m.tgt().clone(), bound)?;
            kleisli::theta(&compose(&e, m)?, m.tgt().clone())
        };
        fold(kleisli::check_kleisli_laws(&lift(&f)?, &lift(&g)?)?);
    }
    Ok(merged)
}

/// Runs one invocation. Exit code 0 on success, 1 on domain errors and
/// negative verdicts, 2 on usage errors.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    match execute(&cli) {
        Ok(Report::Ok(text)) => (0, text),
        Ok(Report::Fail(text)) => (1, text),
        Err(e) => (1, format!("ERROR {}: {e}\n", e.code())),
    }
}
