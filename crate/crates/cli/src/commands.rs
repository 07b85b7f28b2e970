use std::path::Path;
use std::sync::Arc;

use catlens::double::{
    clens_lift_table, clens_to_internal_lens, is_split_opfibration, squares_double_category, validate_double_category,
};
use catlens::enumerate::{enumerate_cofunctors, enumerate_dopfs, enumerate_lenses, SearchBudget};
use catlens::{
    arrow_category, codiscrete, comma_category, compose_cofunctors, compose_functors, compose_lenses,
    compose_state_lenses, discrete, interval_n, is_discrete_opfibration, lambda_category, lens_triangle,
    pullback_category, span_of_cofunctor, validate_state_lens, FinCategory, FinFunctor, ValidationReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::format::{self, Document, LoadError, Structure};
use crate::output::{render_report, write_atomic};
use crate::{
    Build, Cli, Command, ComposeKind, EnumerateKind, Format, Predicate, EXIT_GUARD, EXIT_INVALID, EXIT_OK,
    EXIT_STRUCTURAL,
};

const ASSOCIATIVITY_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Core(#[from] catlens::Error),
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("boundary mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Load(LoadError::Core { source, .. }) | CliError::Core(source) => match source {
                catlens::Error::Structure(_) => EXIT_STRUCTURAL,
                catlens::Error::GuardExceeded { .. } => EXIT_GUARD,
                catlens::Error::Invalid { .. } | catlens::Error::Internal(_) => EXIT_INVALID,
            },
            CliError::Mismatch(_) => EXIT_INVALID,
            CliError::Load(_) | CliError::Write { .. } | CliError::Usage(_) => EXIT_STRUCTURAL,
        }
    }

    fn report(&self) -> Option<&ValidationReport> {
        match self {
            CliError::Load(LoadError::Core { source: catlens::Error::Invalid { report, .. }, .. })
            | CliError::Core(catlens::Error::Invalid { report, .. }) => Some(report),
            _ => None,
        }
    }
}

pub fn run(cli: &Cli) -> u8 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(report) = e.report() {
                eprint!("{}", render_report(report, &[], Format::Text));
            }
            if let CliError::Core(catlens::Error::GuardExceeded { .. }) = e {
                eprintln!("hint: raise --max-candidates or CATLENS_MAX_CANDIDATES");
            }
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Validate { path } => {
            let s = format::load(path)?;
            let (report, notes) = validate(&s, cli)?;
            report_out(cli, &report, &notes)
        }
        Command::Check { predicate, path } => {
            let s = format::load(path)?;
            let report = check(*predicate, &s, path)?;
            report_out(cli, &report, &[])
        }
        Command::Build { what } => {
            let doc = build(what)?;
            emit(cli, &doc.to_json(), &format!("{} document", doc.kind()))?;
            Ok(EXIT_OK)
        }
        Command::Compose { kind, left, right } => {
            let (doc, notes) = compose(*kind, left, right)?;
            emit(cli, &doc.to_json(), &format!("composite {}", doc.kind()))?;
            for n in &notes {
                if cli.out.is_some() {
                    println!("note: {n}");
                } else {
                    eprintln!("note: {n}");
                }
            }
            Ok(EXIT_OK)
        }
        Command::Enumerate { a, b, kind, list } => {
            let text = enumerate(cli, a, b, *kind, *list)?;
            emit(cli, &text, "enumeration")?;
            Ok(EXIT_OK)
        }
    }
}

fn report_out(cli: &Cli, report: &ValidationReport, notes: &[String]) -> Result<u8, CliError> {
    emit(cli, &render_report(report, notes, cli.format), "report")?;
    Ok(if report.is_valid() { EXIT_OK } else { EXIT_INVALID })
}

/// Sends `text` to `--out` when given, otherwise to stdout.
fn emit(cli: &Cli, text: &str, what: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            write_atomic(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
            if cli.format == Format::Text {
                println!("wrote {what} to {}", path.display());
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn validate(s: &Structure, cli: &Cli) -> Result<(ValidationReport, Vec<String>), CliError> {
    let mut notes = Vec::new();
    let report = match s {
        Structure::Category(c) => {
            let report = c.validate();
            if let Some(seed) = cli.seed {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let hits = c.associativity_sample(ASSOCIATIVITY_SAMPLES, &mut rng);
                if !hits.is_empty() && !report.has_law("associativity") {
                    return Err(catlens::Error::Internal(
                        "sampled associativity failure missed by exhaustive check".into(),
                    )
                    .into());
                }
                notes.push(format!(
                    "sampled associativity (seed {seed}, {ASSOCIATIVITY_SAMPLES} draws): {} draws violated it",
                    hits.len()
                ));
            }
            report
        }
        Structure::Functor(f) => {
            let mut report = f.source().validate().scoped("source");
            report.extend(f.target().validate().scoped("target"));
            report.extend(f.validate());
            report
        }
        Structure::Cofunctor(phi) => {
            let mut report = phi.target().validate().scoped("target");
            report.extend(phi.source().validate().scoped("source"));
            report.extend(phi.validate());
            report
        }
        Structure::Lens(l) => {
            let mut report = l.source().validate().scoped("source");
            report.extend(l.view().validate().scoped("view"));
            report.extend(l.validate_all());
            report
        }
        Structure::StateLens(l) => validate_state_lens(l),
        Structure::DoubleCategory(d) => validate_double_category(d),
        Structure::Span(s) => s.validate(),
        Structure::Triangle(t) => t.validate(),
        Structure::CLens { get, put } => {
            let mut budget = SearchBudget::new(cli.max_candidates);
            match clens_to_internal_lens(get, put, &mut budget) {
                Ok(lens) => {
                    notes.push("connecting double functors are unique".into());
                    lens.validate()
                }
                Err(catlens::Error::Invalid { report, .. }) => report,
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok((report, notes))
}

fn check(predicate: Predicate, s: &Structure, path: &Path) -> Result<ValidationReport, CliError> {
    let wrong = |expected| {
        CliError::Usage(format!("{}: `{predicate:?}` needs a {expected} document, found {}", path.display(), s.kind()))
    };
    match (predicate, s) {
        (Predicate::Dopf, Structure::Functor(f)) => Ok(checked(f).unwrap_or_else(|| is_discrete_opfibration(f))),
        (Predicate::Ioo, Structure::Functor(f)) => Ok(checked(f).unwrap_or_else(|| identity_on_objects(f))),
        (Predicate::SplitOpfib, Structure::CLens { get, put }) => match clens_lift_table(get, put) {
            Ok(table) => Ok(is_split_opfibration(get, &table)?),
            Err(catlens::Error::Invalid { report, .. }) => Ok(report),
            Err(e) => Err(e.into()),
        },
        (Predicate::SplitOpfib, _) => Err(wrong("c-lens")),
        _ => Err(wrong("functor")),
    }
}

/// The functor's own validation failures, if any.
fn checked(f: &FinFunctor) -> Option<ValidationReport> {
    let report = f.validate();
    (!report.is_valid()).then_some(report)
}

fn identity_on_objects(f: &FinFunctor) -> ValidationReport {
    let (a, b) = (f.source(), f.target());
    let mut report = ValidationReport::new();
    if a.object_names() != b.object_names() {
        report.fail("identity-on-objects", ["object sets differ"]);
        return report;
    }
    for x in a.objects() {
        if f.on_object(x) != x {
            report.fail("identity-on-objects", [a.obj_name(x), b.obj_name(f.on_object(x))]);
        }
    }
    report
}

/// Object names for `codiscrete`/`discrete`: a single number `n` means `0..n`.
fn object_names(objects: &[String]) -> Vec<String> {
    match objects {
        [n] => match n.parse::<usize>() {
            Ok(n) => (0..n).map(|i| i.to_string()).collect(),
            Err(_) => objects.to_vec(),
        },
        _ => objects.to_vec(),
    }
}

fn category(path: &Path) -> Result<Arc<FinCategory>, CliError> {
    match format::load(path)? {
        Structure::Category(c) => Ok(c),
        other => Err(kind_error(path, "category", &other)),
    }
}

fn functor(path: &Path) -> Result<FinFunctor, CliError> {
    match format::load(path)? {
        Structure::Functor(f) => Ok(f),
        other => Err(kind_error(path, "functor", &other)),
    }
}

fn kind_error(path: &Path, expected: &'static str, found: &Structure) -> CliError {
    LoadError::Kind { path: path.display().to_string(), expected, found: found.kind() }.into()
}

fn build(what: &Build) -> Result<Document, CliError> {
    Ok(match what {
        Build::Codiscrete { objects } => {
            format::category_doc(&codiscrete(&object_names(objects)).map_err(catlens::Error::from)?)
        }
        Build::Discrete { objects } => {
            format::category_doc(&discrete(&object_names(objects)).map_err(catlens::Error::from)?)
        }
        Build::Interval { n } => format::category_doc(&interval_n(*n)),
        Build::Arrow { category: path } => format::category_doc(&arrow_category(&*category(path)?)?),
        Build::Pullback { left, right } => {
            let (f, g) = (functor(left)?, functor(right)?);
            if f.target() != g.target() {
                return Err(CliError::Mismatch(format!(
                    "target of {} does not match target of {}",
                    left.display(),
                    right.display()
                )));
            }
            format::category_doc(&pullback_category(&f, &g)?.apex)
        }
        Build::Comma { functor: path } => format::category_doc(&comma_category(&functor(path)?)?.apex),
        Build::Squares { category: path } => format::double_doc(&squares_double_category(&*category(path)?)?),
        Build::Lambda { cofunctor } => match format::load(cofunctor)? {
            Structure::Cofunctor(phi) => format::category_doc(&lambda_category(&phi)?),
            other => return Err(kind_error(cofunctor, "cofunctor", &other)),
        },
        Build::Span { cofunctor } => match format::load(cofunctor)? {
            Structure::Cofunctor(phi) => format::span_doc(&span_of_cofunctor(&phi)?),
            other => return Err(kind_error(cofunctor, "cofunctor", &other)),
        },
        Build::Triangle { lens } => match format::load(lens)? {
            Structure::Lens(l) => format::triangle_doc(&lens_triangle(&l)?),
            other => return Err(kind_error(lens, "lens", &other)),
        },
    })
}

fn mismatch(left: &Path, left_side: &str, right: &Path, right_side: &str) -> CliError {
    CliError::Mismatch(format!("{left_side} of {} does not match {right_side} of {}", left.display(), right.display()))
}

fn compose(kind: ComposeKind, left: &Path, right: &Path) -> Result<(Document, Vec<String>), CliError> {
    let (l, r) = (format::load(left)?, format::load(right)?);
    let expected = match kind {
        ComposeKind::Functors => "functor",
        ComposeKind::Cofunctors => "cofunctor",
        ComposeKind::Lenses => "lens",
        ComposeKind::StateLenses => "state-lens",
    };
    Ok(match (l, r) {
        (Structure::Functor(f), Structure::Functor(g)) if kind == ComposeKind::Functors => {
            if f.target() != g.source() {
                return Err(mismatch(left, "target", right, "source"));
            }
            let h = compose_functors(&f, &g)?;
            let dopf = if is_discrete_opfibration(&h).is_valid() { "yes" } else { "no" };
            (format::functor_doc(&h), vec![format!("composite is a discrete opfibration: {dopf}")])
        }
        // Diagrammatic order: left is `B ⇸ A`, right is `C ⇸ B`.
        (Structure::Cofunctor(phi), Structure::Cofunctor(gamma)) if kind == ComposeKind::Cofunctors => {
            if phi.source() != gamma.target() {
                return Err(mismatch(left, "source", right, "target"));
            }
            (format::cofunctor_doc(&compose_cofunctors(&phi, &gamma)?), Vec::new())
        }
        (Structure::Lens(f), Structure::Lens(g)) if kind == ComposeKind::Lenses => {
            if f.view() != g.source() {
                return Err(mismatch(left, "view", right, "source"));
            }
            let h = compose_lenses(&f, &g)?;
            (format::lens_doc(&h), vec!["span-pullback cross-check: agree".into()])
        }
        (Structure::StateLens(f), Structure::StateLens(g)) if kind == ComposeKind::StateLenses => {
            if f.view() != g.source() {
                return Err(mismatch(left, "view", right, "source"));
            }
            (format::state_lens_doc(&compose_state_lenses(&f, &g)?), Vec::new())
        }
        (Structure::Functor(_) | Structure::Cofunctor(_) | Structure::Lens(_) | Structure::StateLens(_), r)
            if r.kind() != expected =>
        {
            return Err(kind_error(right, expected, &r))
        }
        (l, _) => return Err(kind_error(left, expected, &l)),
    })
}

#[derive(Serialize)]
struct Enumeration {
    kind: &'static str,
    count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    items: Option<Vec<Document>>,
}

fn enumerate(cli: &Cli, a: &Path, b: &Path, kind: EnumerateKind, list: bool) -> Result<String, CliError> {
    let (ca, cb) = (category(a)?, category(b)?);
    let mut budget = SearchBudget::new(cli.max_candidates);
    let (name, docs): (&'static str, Vec<Document>) = match kind {
        EnumerateKind::Lens => {
            ("lens", enumerate_lenses(&ca, &cb, &mut budget)?.iter().map(format::lens_doc).collect())
        }
        EnumerateKind::Cofunctor => {
            ("cofunctor", enumerate_cofunctors(&ca, &cb, &mut budget)?.iter().map(format::cofunctor_doc).collect())
        }
        EnumerateKind::Dopf => {
            ("dopf", enumerate_dopfs(&ca, &cb, &mut budget)?.iter().map(format::functor_doc).collect())
        }
    };
    Ok(match cli.format {
        Format::Json => {
            let e = Enumeration { kind: name, count: docs.len(), items: list.then_some(docs) };
            let mut s = serde_json::to_string_pretty(&e).expect("enumeration serialises");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = format!("{name}: {}\n", docs.len());
            if list {
                for d in &docs {
                    s.push_str(&serde_json::to_string(d).expect("documents serialise"));
                    s.push('\n');
                }
            }
            s
        }
    })
}
