use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use catlens::double::product_projection;
use catlens::{codiscrete, identity_cofunctor, interval_n, FinCategory, FinFunctor, StateLens};
use catlens_cli::format::{self, Document, Structure};
use tempfile::TempDir;

fn catlens(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catlens"))
        .args(args)
        .current_dir(dir)
        .env_remove("CATLENS_MAX_CANDIDATES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, doc: &Document) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, doc.to_json()).unwrap();
    path
}

fn write_raw(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn morphism_count(json: &str) -> usize {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["morphisms"].as_array().unwrap().len()
}

const NON_ASSOCIATIVE: &str = r#"{"kind":"category","objects":["a"],
 "morphisms":[{"id":"1","dom":"a","cod":"a"},{"id":"x","dom":"a","cod":"a"},{"id":"y","dom":"a","cod":"a"}],
 "identities":{"a":"1"},
 "compose":[{"first":"1","second":"1","result":"1"},{"first":"1","second":"x","result":"x"},
  {"first":"1","second":"y","result":"y"},{"first":"x","second":"1","result":"x"},{"first":"y","second":"1","result":"y"},
  {"first":"x","second":"x","result":"y"},{"first":"x","second":"y","result":"x"},
  {"first":"y","second":"x","result":"y"},{"first":"y","second":"y","result":"x"}]}"#;

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "t.json", &format::category_doc(&catlens::terminal()));
    assert_eq!(catlens(d, &["validate", "t.json"]).status.code(), Some(0));

    write_raw(d, "bad.json", NON_ASSOCIATIVE);
    let out = catlens(d, &["validate", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("associativity: (x, x, x)"), "{}", stdout(&out));

    write_raw(
        d,
        "undeclared.json",
        r#"{"kind":"category","objects":["a"],"morphisms":[{"id":"id_a","dom":"a","cod":"a"}],
            "identities":{"a":"id_a"},"compose":[{"first":"id_a","second":"g","result":"id_a"}]}"#,
    );
    let out = catlens(d, &["validate", "undeclared.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("`g`"));

    write_raw(d, "truncated.json", "{\"kind\": \"category\",\n \"objects\": [");
    let out = catlens(d, &["validate", "truncated.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    assert_eq!(catlens(d, &["validate", "missing.json"]).status.code(), Some(2));
}

#[test]
fn json_report_schema() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write_raw(d, "bad.json", NON_ASSOCIATIVE);
    let out = catlens(d, &["validate", "bad.json", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["verdict", "violations"]);
    assert_eq!(v["verdict"], "invalid");
    let violations = v["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 8);
    assert_eq!(violations[0]["law"], "associativity");
    assert_eq!(violations[0]["witness"], serde_json::json!(["x", "x", "x"]));
}

#[test]
fn seeded_validation_reports_sampled_pass() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write_raw(d, "bad.json", NON_ASSOCIATIVE);
    let a = catlens(d, &["validate", "bad.json", "--seed", "11"]);
    let b = catlens(d, &["validate", "bad.json", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(1));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("sampled associativity (seed 11"));
}

#[test]
fn build_examples() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let out = catlens(d, &["build", "codiscrete", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(morphism_count(&stdout(&out)), 4);

    write(d, "i.json", &format::category_doc(&interval_n(1)));
    let out = catlens(d, &["build", "arrow", "i.json"]);
    assert_eq!(morphism_count(&stdout(&out)), 6);

    let c = Arc::new(codiscrete(&["p", "q"]).unwrap());
    write(d, "id.json", &format::cofunctor_doc(&identity_cofunctor(&c)));
    assert_eq!(catlens(d, &["build", "span", "id.json", "--out", "span.json"]).status.code(), Some(0));
    match format::load(&d.join("span.json")).unwrap() {
        Structure::Span(s) => {
            assert!(catlens::category::is_isomorphic(&s.apex, &c));
            assert!(s.left.is_bijective() && s.right.is_bijective());
            assert_eq!(s.left.on_object(0), s.right.on_object(0));
        }
        other => panic!("expected a span, got {}", other.kind()),
    }
}

#[test]
fn build_outputs_reparse_to_equal_structures() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c = Arc::new(codiscrete(&["p", "q"]).unwrap());
    write(d, "c.json", &format::category_doc(&c));
    write(d, "i.json", &format::category_doc(&interval_n(2)));
    write(d, "f.json", &format::functor_doc(&FinFunctor::identity(c.clone())));
    write(d, "phi.json", &format::cofunctor_doc(&identity_cofunctor(&c)));
    write(d, "lens.json", &format::lens_doc(&catlens::FinLens::identity(c.clone())));
    let builds: &[&[&str]] = &[
        &["codiscrete", "3"],
        &["discrete", "a", "b"],
        &["interval", "3"],
        &["arrow", "i.json"],
        &["pullback", "f.json", "f.json"],
        &["comma", "f.json"],
        &["squares", "i.json"],
        &["lambda", "phi.json"],
        &["span", "phi.json"],
        &["triangle", "lens.json"],
    ];
    for (k, b) in builds.iter().enumerate() {
        let name = format!("out{k}.json");
        let mut args = vec!["build"];
        args.extend_from_slice(b);
        args.extend_from_slice(&["--out", &name]);
        let out = catlens(d, &args);
        assert_eq!(out.status.code(), Some(0), "{b:?}: {}", stderr(&out));
        let text = std::fs::read_to_string(d.join(&name)).unwrap();
        let loaded = format::load(&d.join(&name)).unwrap();
        let again = match &loaded {
            Structure::Category(c) => format::category_doc(c),
            Structure::DoubleCategory(x) => format::double_doc(x),
            Structure::Span(s) => format::span_doc(s),
            Structure::Triangle(t) => format::triangle_doc(t),
            other => panic!("unexpected {}", other.kind()),
        };
        assert_eq!(again.to_json(), text, "{b:?}");
        let v = catlens(d, &["validate", &name]);
        assert_eq!(v.status.code(), Some(0), "{b:?}: {}", stdout(&v));
    }
}

#[test]
fn compose_identities_and_dopfs() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c = Arc::new(codiscrete(&["p", "q"]).unwrap());
    let id = FinFunctor::identity(c.clone());
    write(d, "id.json", &format::functor_doc(&id));
    let out = catlens(d, &["compose", "functors", "id.json", "id.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), format::functor_doc(&id).to_json());
    assert!(stderr(&out).contains("discrete opfibration: yes"));

    let lens = catlens::FinLens::identity(c.clone());
    write(d, "l.json", &format::lens_doc(&lens));
    let out = catlens(d, &["compose", "lenses", "l.json", "l.json", "--out", "ll.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("span-pullback cross-check: agree"));
    assert_eq!(std::fs::read_to_string(d.join("ll.json")).unwrap(), format::lens_doc(&lens).to_json());

    write(d, "phi.json", &format::cofunctor_doc(&identity_cofunctor(&c)));
    let out = catlens(d, &["compose", "cofunctors", "phi.json", "phi.json"]);
    assert_eq!(stdout(&out), format::cofunctor_doc(&identity_cofunctor(&c)).to_json());
}

#[test]
fn compose_mismatch_names_both_sides() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "a.json", &format::functor_doc(&FinFunctor::identity(Arc::new(interval_n(1)))));
    write(d, "b.json", &format::functor_doc(&FinFunctor::identity(Arc::new(interval_n(2)))));
    let out = catlens(d, &["compose", "functors", "a.json", "b.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("boundary mismatch") && err.contains("a.json") && err.contains("b.json"), "{err}");

    let out = catlens(d, &["compose", "lenses", "a.json", "b.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn state_lens_projection_chain() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let triples: Vec<String> = ["a", "b"]
        .iter()
        .flat_map(|x| ["c", "d"].iter().flat_map(move |y| ["e", "f"].iter().map(move |z| format!("{x}{y}{z}"))))
        .collect();
    let pairs: Vec<String> = ["ac", "ad", "bc", "bd"].iter().map(|s| s.to_string()).collect();
    let firsts = ["a".to_string(), "b".to_string()];
    let first = StateLens::new(&triples, &pairs, |s| s[..2].to_string(), |s, v| format!("{v}{}", &s[2..])).unwrap();
    let second = StateLens::new(&pairs, &firsts, |s| s[..1].to_string(), |s, v| format!("{v}{}", &s[1..])).unwrap();
    write(d, "s1.json", &format::state_lens_doc(&first));
    write(d, "s2.json", &format::state_lens_doc(&second));
    let out = catlens(d, &["compose", "state-lenses", "s1.json", "s2.json", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let composite = match format::load(&d.join("s.json")).unwrap() {
        Structure::StateLens(l) => l,
        other => panic!("expected a state lens, got {}", other.kind()),
    };
    for s in &triples {
        assert_eq!(composite.get_named(s), Some(&s[..1]));
        for v in &firsts {
            let expected = format!("{v}{}", &s[1..]);
            assert_eq!(composite.put_named(s, v), Some(expected.as_str()));
        }
    }
}

#[test]
fn enumerate_counts_and_guard() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write(d, "c1.json", &format::category_doc(&codiscrete(&["0"]).unwrap()));
    write(d, "c2.json", &format::category_doc(&codiscrete(&["0", "1"]).unwrap()));
    write(d, "i.json", &format::category_doc(&interval_n(1)));
    write(d, "t.json", &format::category_doc(&catlens::terminal()));
    let count = |a: &str, b: &str, kind: &str| {
        let out = catlens(d, &["enumerate", a, b, "--kind", kind, "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        v["count"].as_u64().unwrap()
    };
    assert_eq!(count("c2.json", "c2.json", "lens"), 2);
    assert_eq!(count("c2.json", "c1.json", "lens"), 1);
    assert_eq!(count("i.json", "t.json", "dopf"), 0);
    assert_eq!(count("i.json", "t.json", "lens"), 1);

    let listed = catlens(d, &["enumerate", "c2.json", "c2.json", "--kind", "lens", "--list"]);
    assert_eq!(stdout(&listed).lines().count(), 3);
    assert_eq!(listed.stdout, catlens(d, &["enumerate", "c2.json", "c2.json", "--kind", "lens", "--list"]).stdout);

    let out = catlens(d, &["enumerate", "c2.json", "c2.json", "--kind", "cofunctor", "--max-candidates", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("3 candidates"));

    let out = Command::new(env!("CARGO_BIN_EXE_catlens"))
        .args(["enumerate", "c2.json", "c2.json", "--kind", "cofunctor"])
        .current_dir(d)
        .env("CATLENS_MAX_CANDIDATES", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn checks_on_functors_and_clenses() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let i = Arc::new(interval_n(1));
    let t = Arc::new(catlens::terminal());
    write(d, "bang.json", &format::functor_doc(&FinFunctor::to_terminal(i.clone(), t).unwrap()));
    let out = catlens(d, &["check", "dopf", "bang.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(catlens(d, &["check", "ioo", "bang.json"]).status.code(), Some(1));
    write(d, "id.json", &format::functor_doc(&FinFunctor::identity(i.clone())));
    assert_eq!(catlens(d, &["check", "dopf", "id.json"]).status.code(), Some(0));
    assert_eq!(catlens(d, &["check", "ioo", "id.json"]).status.code(), Some(0));
    assert_eq!(catlens(d, &["check", "split-opfib", "id.json"]).status.code(), Some(2));

    let fibre: Arc<FinCategory> = Arc::new(codiscrete(&["u", "v"]).unwrap());
    let (proj, p) = product_projection(&i, &fibre).unwrap();
    write(
        d,
        "clens.json",
        &Document::CLens(format::CLensDoc {
            get: format::Ref::Inline(Box::new(format::functor_doc(&proj))),
            put: format::Ref::Inline(Box::new(format::functor_doc(&p))),
        }),
    );
    let out = catlens(d, &["check", "split-opfib", "clens.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let out = catlens(d, &["validate", "clens.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("unique"));
}

#[test]
fn references_resolve_relative_to_the_referencing_file() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    std::fs::create_dir(d.join("cats")).unwrap();
    write(d, "cats/c.json", &format::category_doc(&codiscrete(&["0", "1"]).unwrap()));
    write_raw(
        d,
        "f.json",
        r#"{"kind":"functor","source":"cats/c.json","target":"cats/c.json",
            "f0":{"0":"1","1":"0"},
            "f1":{"(0,0)":"(1,1)","(1,1)":"(0,0)","(0,1)":"(1,0)","(1,0)":"(0,1)"}}"#,
    );
    write_raw(
        d,
        "cats/g.json",
        r#"{"kind":"functor","source":"c.json","target":"c.json",
            "f0":{"0":"0","1":"0"},
            "f1":{"(0,0)":"(0,0)","(1,1)":"(0,0)","(0,1)":"(0,0)","(1,0)":"(0,0)"}}"#,
    );
    assert_eq!(catlens(d, &["validate", "f.json"]).status.code(), Some(0));
    assert_eq!(catlens(d, &["validate", "cats/g.json"]).status.code(), Some(0));
    let out = catlens(d, &["check", "dopf", "cats/g.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cofunctor_p0_is_optional() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let c = Arc::new(codiscrete(&["0", "1"]).unwrap());
    let mut doc = format::cofunctor_doc(&identity_cofunctor(&c));
    if let Document::Cofunctor(x) = &mut doc {
        x.p0 = None;
    }
    write(d, "phi.json", &doc);
    assert_eq!(catlens(d, &["validate", "phi.json"]).status.code(), Some(0));
}
