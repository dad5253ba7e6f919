//! The `dimw` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dimw_core::builtins::builtin;
use dimw_core::congruence::{all_congruences, quotient_lattice, Congruence};
use dimw_core::dimension::{self as dim, dimension_monoid, DimensionWord};
use dimw_core::io::{parse_lattice, DimReport, DimVectorFile};
use dimw_core::lattice::FiniteLattice;
use dimw_core::report::{run_check, CheckReport, Status};
use dimw_core::{catalog, dot, geometry as geo, Error};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "dimw", version, about = "Dimension monoids of finite lattices")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct Target {
    /// Builtin lattice, e.g. `N5`, `boolean:3`, `subspace:2:3`
    #[arg(long)]
    builtin: Option<String>,
    /// Lattice file in JSON
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Load a lattice and report its size
    Validate {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        json: bool,
    },
    /// Lattice properties
    Props {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        json: bool,
    },
    /// The congruence lattice
    Con {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        json: bool,
    },
    /// The dimension monoid as a QO-system
    Dim {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a dimension word
    Eval {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare two dimension words
    Compare {
        #[command(flatten)]
        target: Target,
        /// Give exactly twice
        #[arg(long, required = true)]
        word: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Perspectivity and normality summary
    Geom {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run consistency checks
    Check {
        #[command(flatten)]
        target: Target,
        /// Run every check
        #[arg(long)]
        all: bool,
        /// Run the named check; repeatable
        #[arg(long = "only")]
        only: Vec<String>,
        /// Word length for the extension check
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Fill in elapsed_ms
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        json: bool,
    },
    /// Hasse diagram in DOT
    Dot {
        #[command(flatten)]
        target: Target,
        /// Label covers with their generator points
        #[arg(long)]
        labels: bool,
    },
    /// Builtins and their expected dimension monoids
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

const SYNOPSIS: &str = "Usage: dimw <COMMAND> (--builtin NAME[:params] | --file PATH) [OPTIONS]\n\
Commands: validate props con dim eval compare geom check dot catalog; see `dimw --help`";

/// Exit status: 0 success, 1 failed check or invalid input, 2 usage.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn load(t: &Target) -> Result<(FiniteLattice, Option<Congruence>), Error> {
    match (&t.builtin, &t.file) {
        (Some(b), _) => Ok((builtin(b)?, None)),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            parse_lattice(&text)
        }
        (None, None) => unreachable!("clap enforces a target"),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

pub const CHECKS: &[&str] = &[
    "axioms",
    "congruence-correspondence",
    "modular-cancellative",
    "projectivity-classes",
    "distributive",
    "schreier",
    "functor-dual",
    "functor-product",
    "functor-quotient",
    "dep",
    "relations",
    "index",
    "n-distributive",
    "normal",
    "normal-kernel",
    "diamond-ideal",
    "two-piece",
    "transitivity",
    "geometric-dimension",
    "additivity",
    "v-measure",
    "refinement",
    "jonsson",
];

/// Quotients checked: the sidecar congruence if present, else every
/// congruence up to a cap.
fn quotient_checks(l: &FiniteLattice, sidecar: Option<&Congruence>) -> dimw_core::Result<String> {
    let list = match sidecar {
        Some(c) => vec![c.clone()],
        None => all_congruences(l)?.congruences.into_iter().take(64).collect(),
    };
    for c in &list {
        dim::quotient_check(l, c)?;
    }
    Ok(format!("{} quotients", list.len()))
}

fn run_named(
    name: &str,
    l: &FiniteLattice,
    sidecar: Option<&Congruence>,
    bound: usize,
    seed: u64,
) -> dimw_core::Result<String> {
    match name {
        "axioms" => dim::axiom_suite(l),
        "congruence-correspondence" => dim::congruence_correspondence_check(l, 200, seed),
        "modular-cancellative" => dim::modularity_cancellativity_check(l),
        "projectivity-classes" => dim::modular_classes_check(l),
        "distributive" => dim::distributive_check(l),
        "schreier" => dim::schreier_check(l, 8),
        "functor-dual" => dim::dual_check(l),
        "functor-product" => dim::product_check(l, &builtin("chain:2")?),
        "functor-quotient" => quotient_checks(l, sidecar),
        "dep" => dim::dep_check_rect(l, bound, seed),
        "relations" => geo::relations_check(l),
        "index" => geo::index_equality_check(l),
        "n-distributive" => geo::n_distributive_check(l, l.height().clamp(1, 3)),
        "normal" => geo::normality_check(l),
        "normal-kernel" => geo::normal_kernel_check(l),
        "diamond-ideal" => geo::diam_ideal_check(l, 3),
        "two-piece" => geo::two_piece_check(l),
        "transitivity" => geo::transitivity_cancellativity_check(l),
        "geometric-dimension" => geo::geometric_dimension_check(l),
        "additivity" => geo::additivity_check(l),
        "v-measure" => geo::v_measure_check(l),
        "refinement" => geo::refinement_matrix_check(l, 200),
        "jonsson" => geo::jonsson_check(l),
        _ => unreachable!("names are validated"),
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIP",
    }
}

/// Run `dimw` with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let mut text = e.render().to_string();
            if !e.use_stderr() {
                let _ = write!(out, "{text}");
                return code;
            }
            if !text.contains("Usage:") {
                text.push_str(&format!("\n{SYNOPSIS}\n"));
            }
            let _ = write!(err, "{text}");
            return code;
        }
    };
    match execute(cli.verb, out) {
        Ok(code) => code,
        Err(Outcome::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\n{SYNOPSIS}");
            EXIT_USAGE
        }
        Err(Outcome::Failed(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
        Err(Outcome::Closed) => EXIT_OK,
    }
}

enum Outcome {
    Usage(String),
    Failed(Error),
    /// The reader went away; not an error.
    Closed,
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::Failed(e)
    }
}

impl From<std::io::Error> for Outcome {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Outcome::Closed;
        }
        Outcome::Failed(Error::Parse(e.to_string()))
    }
}

fn execute(verb: Verb, out: &mut dyn Write) -> Result<i32, Outcome> {
    match verb {
        Verb::Validate { target, json } => {
            let (l, c) = load(&target)?;
            if json {
                let v = json!({
                    "name": l.name_label(),
                    "valid": true,
                    "elements": l.len(),
                    "covers": l.covers().len(),
                    "congruence": c.as_ref().map(|c| c.num_blocks()),
                });
                writeln!(out, "{}", pretty(&v))?;
            } else {
                writeln!(out, "{}: lattice with {} elements and {} covers", l.name_label(), l.len(), l.covers().len())?;
                if let Some(c) = c {
                    writeln!(out, "congruence with {} blocks", c.num_blocks())?;
                }
            }
        }
        Verb::Props { target, json } => {
            let (l, _) = load(&target)?;
            let p = l.properties();
            if json {
                writeln!(out, "{}", pretty(&p))?;
            } else {
                let v = serde_json::to_value(&p).expect("serializable");
                for (k, v) in v.as_object().expect("object") {
                    writeln!(out, "{k:<26}{v}")?;
                }
            }
        }
        Verb::Con { target, json } => {
            let (l, sidecar) = load(&target)?;
            let con = all_congruences(&l)?;
            let blocks: Vec<Vec<Vec<String>>> = con.congruences.iter().map(|c| c.to_named_blocks(&l)).collect();
            let quotient = sidecar.as_ref().map(|c| quotient_lattice(&l, c));
            if json {
                let v = json!({
                    "lattice": l.name_label(),
                    "count": con.len(),
                    "congruences": blocks,
                    "join_irreducibles": con.join_irreducibles,
                    "meet_irreducibles": con.meet_irreducibles,
                    "quotient": quotient.as_ref().map(|q| q.lattice.names().to_vec()),
                });
                writeln!(out, "{}", pretty(&v))?;
            } else {
                writeln!(out, "{} congruences", con.len())?;
                for (i, b) in blocks.iter().enumerate() {
                    let tag = match (con.join_irreducibles.contains(&i), con.meet_irreducibles.contains(&i)) {
                        (true, true) => " (join- and meet-irreducible)",
                        (true, false) => " (join-irreducible)",
                        (false, true) => " (meet-irreducible)",
                        _ => "",
                    };
                    let parts: Vec<String> = b.iter().map(|blk| blk.join(" ")).collect();
                    writeln!(out, "θ{i}: {}{tag}", parts.join(" | "))?;
                }
                if let Some(q) = quotient {
                    writeln!(out, "quotient by the file's congruence: {} elements", q.lattice.len())?;
                }
            }
        }
        Verb::Dim { target, json } => {
            let (l, _) = load(&target)?;
            let d = dimension_monoid(&l);
            let report = DimReport::new(&d);
            if json {
                writeln!(out, "{}", pretty(&report))?;
            } else {
                writeln!(out, "{}: |P| = {}, p0 = {{{}}}", report.lattice, d.qo.len(), report.p0.join(", "))?;
                let rel: Vec<String> = report.qosystem.rel.iter().map(|[p, q]| format!("{p} ⊲ {q}")).collect();
                writeln!(out, "relations: {}", if rel.is_empty() { "none".into() } else { rel.join(", ") })?;
                for c in &report.classes {
                    writeln!(out, "{}: {}", c.point, c.intervals.join(" "))?;
                }
            }
        }
        Verb::Eval { target, word, json } => {
            let (l, _) = load(&target)?;
            let d = dimension_monoid(&l);
            let w = DimensionWord::parse(&l, &word)?;
            let v = d.eval_word(&w);
            if json {
                let body = json!({ "word": word, "vector": DimVectorFile::from_vector(&d.qo, &v) });
                writeln!(out, "{}", pretty(&body))?;
            } else {
                writeln!(out, "{}", d.describe(&v))?;
            }
        }
        Verb::Compare { target, word, json } => {
            if word.len() != 2 {
                return Err(Outcome::Usage(format!("compare needs exactly two --word options, got {}", word.len())));
            }
            let (l, _) = load(&target)?;
            let d = dimension_monoid(&l);
            let w1 = DimensionWord::parse(&l, &word[0])?;
            let w2 = DimensionWord::parse(&l, &word[1])?;
            let cmp = d.word_compare(&w1, &w2);
            if json {
                let body = json!({
                    "left": DimVectorFile::from_vector(&d.qo, &d.eval_word(&w1)),
                    "right": DimVectorFile::from_vector(&d.qo, &d.eval_word(&w2)),
                    "relation": cmp.as_str(),
                });
                writeln!(out, "{}", pretty(&body))?;
            } else {
                writeln!(out, "{}", cmp.as_str())?;
            }
        }
        Verb::Geom { target, bound, json } => {
            let (l, _) = load(&target)?;
            let s = geo::summary(&l, bound);
            if json {
                writeln!(out, "{}", pretty(&s))?;
            } else {
                let v = serde_json::to_value(&s).expect("serializable");
                for (k, v) in v.as_object().expect("object") {
                    writeln!(out, "{k:<26}{v}")?;
                }
            }
        }
        Verb::Check { target, all, only, bound, seed, timings, json } => {
            if all == !only.is_empty() {
                return Err(Outcome::Usage("give either --all or at least one --only NAME".into()));
            }
            if let Some(bad) = only.iter().find(|n| !CHECKS.contains(&n.as_str())) {
                return Err(Outcome::Usage(format!("unknown check `{bad}`; known: {}", CHECKS.join(", "))));
            }
            let (l, sidecar) = load(&target)?;
            let names: Vec<&str> = if all { CHECKS.to_vec() } else { only.iter().map(String::as_str).collect() };
            let reports: Vec<CheckReport> = names
                .iter()
                .map(|n| run_check(n, timings, || run_named(n, &l, sidecar.as_ref(), bound, seed)))
                .collect();
            if json {
                writeln!(out, "{}", pretty(&reports))?;
            } else {
                for r in &reports {
                    let mut line = format!("{} {:<27} {}", status_word(r.status), r.check, r.detail);
                    if !r.witness.is_empty() {
                        line.push_str(&format!(" [{}]", r.witness.join(", ")));
                    }
                    if let Some(ms) = r.elapsed_ms {
                        line.push_str(&format!(" ({ms} ms)"));
                    }
                    writeln!(out, "{}", line.trim_end())?;
                }
            }
            if reports.iter().any(|r| !r.passed()) {
                return Ok(EXIT_FAIL);
            }
        }
        Verb::Dot { target, labels } => {
            let (l, _) = load(&target)?;
            let d = labels.then(|| dimension_monoid(&l));
            write!(out, "{}", dot::export_dot(&l, d.as_ref()))?;
        }
        Verb::Catalog { json } => {
            if json {
                let rows: Vec<_> = catalog::entries()
                    .iter()
                    .map(|e| json!({ "key": e.key, "points": e.expectation.points, "idempotent": e.expectation.idempotent, "antichain": e.expectation.antichain, "headline": e.expectation.headline() }))
                    .collect();
                writeln!(out, "{}", pretty(&rows))?;
            } else {
                write!(out, "{}", catalog::text())?;
            }
        }
    }
    Ok(EXIT_OK)
}
