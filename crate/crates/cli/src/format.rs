//! JSON structure files and their conversion to and from in-memory values.
//!
//! Every reference to another structure is either a path, resolved against
//! the directory of the referencing file, or the structure inlined.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use catlens::cofunctor::CofunctorSpan;
use catlens::double::FinDoubleCategory;
use catlens::lens::LensTriangle;
use catlens::{FinCategory, FinCofunctor, FinFunctor, FinLens, StateLens, StructureError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_DEPTH: usize = 32;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: expected a {expected} document, found {found}")]
    Kind { path: String, expected: &'static str, found: &'static str },
    #[error("{path}: {source}")]
    Structure { path: String, source: StructureError },
    #[error("{path}: {source}")]
    Core { path: String, source: catlens::Error },
    #[error("{0}: references nested too deeply")]
    Depth(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref {
    Path(String),
    Inline(Box<Document>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Document {
    Category(CategoryDoc),
    Functor(FunctorDoc),
    Cofunctor(CofunctorDoc),
    Lens(LensDoc),
    StateLens(StateLensDoc),
    DoubleCategory(DoubleCategoryDoc),
    CLens(CLensDoc),
    Span(SpanDoc),
    Triangle(TriangleDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Category(_) => "category",
            Document::Functor(_) => "functor",
            Document::Cofunctor(_) => "cofunctor",
            Document::Lens(_) => "lens",
            Document::StateLens(_) => "state-lens",
            Document::DoubleCategory(_) => "double-category",
            Document::CLens(_) => "c-lens",
            Document::Span(_) => "span",
            Document::Triangle(_) => "triangle",
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialise");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeDoc {
    pub first: String,
    pub second: String,
    pub result: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDoc>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<ComposeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDoc {
    pub source: Ref,
    pub target: Ref,
    pub f0: BTreeMap<String, String>,
    pub f1: BTreeMap<String, String>,
}

/// A cofunctor `source ⇸ target`: updates in `source`, lifts in `target`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CofunctorDoc {
    pub source: Ref,
    pub target: Ref,
    pub phi0: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p0: Option<BTreeMap<String, String>>,
    pub phi1: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensDoc {
    pub get: Ref,
    pub put: Ref,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateLensDoc {
    pub source: Vec<String>,
    pub view: Vec<String>,
    pub get: BTreeMap<String, String>,
    pub put: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleCategoryDoc {
    pub objects: Ref,
    pub morphisms: Ref,
    pub dom: Ref,
    pub cod: Ref,
    pub identity: Ref,
    pub compose: Ref,
}

/// `get` is `F: A → B`; `put` is `P: F/B → A`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CLensDoc {
    pub get: Ref,
    pub put: Ref,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanDoc {
    pub apex: Ref,
    pub left: Ref,
    pub right: Ref,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangleDoc {
    pub apex: Ref,
    pub left: Ref,
    pub right: Ref,
    pub base: Ref,
}

/// A loaded structure.
#[derive(Debug, Clone)]
pub enum Structure {
    Category(Arc<FinCategory>),
    Functor(FinFunctor),
    Cofunctor(FinCofunctor),
    Lens(FinLens),
    StateLens(StateLens),
    DoubleCategory(Box<FinDoubleCategory>),
    CLens { get: FinFunctor, put: FinFunctor },
    Span(CofunctorSpan),
    Triangle(LensTriangle),
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Category(_) => "category",
            Structure::Functor(_) => "functor",
            Structure::Cofunctor(_) => "cofunctor",
            Structure::Lens(_) => "lens",
            Structure::StateLens(_) => "state-lens",
            Structure::DoubleCategory(_) => "double-category",
            Structure::CLens { .. } => "c-lens",
            Structure::Span(_) => "span",
            Structure::Triangle(_) => "triangle",
        }
    }
}

/// Reads and builds the structure in `path`.
pub fn load(path: &Path) -> Result<Structure, LoadError> {
    let doc = read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Loader { origin: path.display().to_string(), dir, depth: 0 }.build(&doc)
}

fn read(path: &Path) -> Result<Document, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| LoadError::Parse { path: shown, source })
}

struct Loader {
    /// File the document being built came from, for messages.
    origin: String,
    dir: PathBuf,
    depth: usize,
}

impl Loader {
    fn structure<T>(&self, r: StructureResult<T>) -> Result<T, LoadError> {
        r.map_err(|source| LoadError::Structure { path: self.origin.clone(), source })
    }

    fn core<T>(&self, r: catlens::Result<T>) -> Result<T, LoadError> {
        r.map_err(|source| match source {
            catlens::Error::Structure(source) => LoadError::Structure { path: self.origin.clone(), source },
            source => LoadError::Core { path: self.origin.clone(), source },
        })
    }

    fn resolve(&self, r: &Ref) -> Result<Structure, LoadError> {
        if self.depth >= MAX_DEPTH {
            return Err(LoadError::Depth(self.origin.clone()));
        }
        match r {
            Ref::Inline(doc) => {
                Loader { origin: self.origin.clone(), dir: self.dir.clone(), depth: self.depth + 1 }.build(doc)
            }
            Ref::Path(p) => {
                let path = self.dir.join(p);
                let doc = read(&path)?;
                let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                Loader { origin: path.display().to_string(), dir, depth: self.depth + 1 }.build(&doc)
            }
        }
    }

    fn mismatch(&self, expected: &'static str, found: &Structure) -> LoadError {
        LoadError::Kind { path: self.origin.clone(), expected, found: found.kind() }
    }

    fn category(&self, r: &Ref) -> Result<Arc<FinCategory>, LoadError> {
        match self.resolve(r)? {
            Structure::Category(c) => Ok(c),
            other => Err(self.mismatch("category", &other)),
        }
    }

    fn functor(&self, r: &Ref) -> Result<FinFunctor, LoadError> {
        match self.resolve(r)? {
            Structure::Functor(f) => Ok(f),
            other => Err(self.mismatch("functor", &other)),
        }
    }

    fn cofunctor(&self, r: &Ref) -> Result<FinCofunctor, LoadError> {
        match self.resolve(r)? {
            Structure::Cofunctor(f) => Ok(f),
            other => Err(self.mismatch("cofunctor", &other)),
        }
    }

    fn build(&self, doc: &Document) -> Result<Structure, LoadError> {
        Ok(match doc {
            Document::Category(c) => {
                let morphisms: Vec<(&str, &str, &str)> =
                    c.morphisms.iter().map(|m| (m.id.as_str(), m.dom.as_str(), m.cod.as_str())).collect();
                let identities: Vec<(&str, &str)> =
                    c.identities.iter().map(|(a, g)| (a.as_str(), g.as_str())).collect();
                let compose: Vec<(&str, &str, &str)> =
                    c.compose.iter().map(|e| (e.first.as_str(), e.second.as_str(), e.result.as_str())).collect();
                let objects: Vec<&str> = c.objects.iter().map(String::as_str).collect();
                let cat = self.structure(FinCategory::from_named(&objects, &morphisms, &identities, &compose))?;
                Structure::Category(Arc::new(cat))
            }
            Document::Functor(f) => {
                let (source, target) = (self.category(&f.source)?, self.category(&f.target)?);
                Structure::Functor(self.structure(FinFunctor::from_named(
                    source,
                    target,
                    &pairs(&f.f0),
                    &pairs(&f.f1),
                ))?)
            }
            Document::Cofunctor(c) => {
                let (source, target) = (self.category(&c.source)?, self.category(&c.target)?);
                let phi = match &c.p0 {
                    Some(p0) => FinCofunctor::from_named(target, source, &pairs(&c.phi0), &pairs(p0), &pairs(&c.phi1)),
                    None => {
                        let p0 = self.structure(inferred_p0(&target, &c.phi1))?;
                        FinCofunctor::from_named(target, source, &pairs(&c.phi0), &pairs(&p0), &pairs(&c.phi1))
                    }
                };
                Structure::Cofunctor(self.structure(phi)?)
            }
            Document::Lens(l) => {
                let (get, put) = (self.functor(&l.get)?, self.cofunctor(&l.put)?);
                Structure::Lens(self.structure(FinLens::new(get, put))?)
            }
            Document::StateLens(s) => {
                let lens = StateLens::from_named(&s.source, &s.view, &owned_pairs(&s.get), &owned_pairs(&s.put));
                Structure::StateLens(self.structure(lens)?)
            }
            Document::DoubleCategory(d) => {
                let objects = self.category(&d.objects)?;
                let morphisms = self.category(&d.morphisms)?;
                let ddom = self.functor(&d.dom)?;
                let dcod = self.functor(&d.cod)?;
                let did = self.functor(&d.identity)?;
                let dcomp = self.functor(&d.compose)?;
                if ddom.source() != &morphisms || ddom.target() != &objects {
                    return Err(LoadError::Structure {
                        path: self.origin.clone(),
                        source: StructureError::Boundary("`dom` does not go from morphisms to objects".into()),
                    });
                }
                Structure::DoubleCategory(Box::new(self.core(FinDoubleCategory::new(ddom, dcod, did, dcomp))?))
            }
            Document::CLens(c) => Structure::CLens { get: self.functor(&c.get)?, put: self.functor(&c.put)? },
            Document::Span(s) => {
                let apex = self.category(&s.apex)?;
                let (left, right) = (self.functor(&s.left)?, self.functor(&s.right)?);
                if left.source() != &apex {
                    return Err(LoadError::Structure {
                        path: self.origin.clone(),
                        source: StructureError::Boundary("span legs do not start at the apex".into()),
                    });
                }
                Structure::Span(self.core(CofunctorSpan::new(left, right))?)
            }
            Document::Triangle(t) => {
                let apex = self.category(&t.apex)?;
                let (left, right, base) = (self.functor(&t.left)?, self.functor(&t.right)?, self.functor(&t.base)?);
                if left.source() != &apex || right.source() != &apex {
                    return Err(LoadError::Structure {
                        path: self.origin.clone(),
                        source: StructureError::Boundary("triangle legs do not start at the apex".into()),
                    });
                }
                Structure::Triangle(LensTriangle { apex, left, right, base })
            }
        })
    }
}

type StructureResult<T> = std::result::Result<T, StructureError>;

/// `p0` read off as the codomains of the chosen lifts.
fn inferred_p0(target: &FinCategory, phi1: &BTreeMap<String, String>) -> StructureResult<BTreeMap<String, String>> {
    phi1.iter()
        .map(|(k, g)| {
            let g = target
                .mor_id(g)
                .ok_or_else(|| StructureError::Undeclared { id: g.clone(), context: "values of phi1".into() })?;
            Ok((k.clone(), target.obj_name(target.cod(g)).to_string()))
        })
        .collect()
}

fn pairs(map: &BTreeMap<String, String>) -> Vec<(&str, &str)> {
    map.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
}

fn owned_pairs(map: &BTreeMap<String, String>) -> Vec<(String, String)> {
    map.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
}

fn inline(doc: Document) -> Ref {
    Ref::Inline(Box::new(doc))
}

pub fn category_doc(c: &FinCategory) -> Document {
    Document::Category(CategoryDoc {
        objects: c.object_names().to_vec(),
        morphisms: c
            .morphisms()
            .map(|g| MorphismDoc {
                id: c.mor_name(g).into(),
                dom: c.obj_name(c.dom(g)).into(),
                cod: c.obj_name(c.cod(g)).into(),
            })
            .collect(),
        identities: c.objects().map(|a| (c.obj_name(a).into(), c.mor_name(c.ident(a)).into())).collect(),
        compose: c
            .composable_pairs()
            .into_iter()
            .map(|(g, h)| ComposeDoc {
                first: c.mor_name(g).into(),
                second: c.mor_name(h).into(),
                result: c.mor_name(c.compose(g, h).expect("composable")).into(),
            })
            .collect(),
    })
}

pub fn functor_doc(f: &FinFunctor) -> Document {
    let (a, b) = (f.source(), f.target());
    Document::Functor(FunctorDoc {
        source: inline(category_doc(a)),
        target: inline(category_doc(b)),
        f0: a.objects().map(|x| (a.obj_name(x).into(), b.obj_name(f.on_object(x)).into())).collect(),
        f1: a.morphisms().map(|g| (a.mor_name(g).into(), b.mor_name(f.on_morphism(g)).into())).collect(),
    })
}

pub fn cofunctor_doc(phi: &FinCofunctor) -> Document {
    let (a, b) = (phi.target(), phi.source());
    let anchors = phi.anchors();
    Document::Cofunctor(CofunctorDoc {
        source: inline(category_doc(b)),
        target: inline(category_doc(a)),
        phi0: a.objects().map(|x| (a.obj_name(x).into(), b.obj_name(phi.object_map()[x]).into())).collect(),
        p0: Some(
            (0..anchors.len()).map(|i| (phi.anchor_name(i), a.obj_name(phi.lift_codomains()[i]).to_string())).collect(),
        ),
        phi1: (0..anchors.len()).map(|i| (phi.anchor_name(i), a.mor_name(phi.lifts()[i]).to_string())).collect(),
    })
}

pub fn lens_doc(l: &FinLens) -> Document {
    Document::Lens(LensDoc { get: inline(functor_doc(l.get())), put: inline(cofunctor_doc(l.put())) })
}

pub fn state_lens_doc(l: &StateLens) -> Document {
    let (a, b) = (l.source(), l.view());
    Document::StateLens(StateLensDoc {
        source: a.to_vec(),
        view: b.to_vec(),
        get: (0..a.len()).map(|x| (a[x].clone(), b[l.get(x)].clone())).collect(),
        put: (0..a.len())
            .flat_map(|x| (0..b.len()).map(move |y| (x, y)))
            .map(|(x, y)| (catlens::category::anchor_token(&a[x], &b[y]), a[l.put(x, y)].clone()))
            .collect(),
    })
}

pub fn double_doc(d: &FinDoubleCategory) -> Document {
    Document::DoubleCategory(DoubleCategoryDoc {
        objects: inline(category_doc(d.obj_cat())),
        morphisms: inline(category_doc(d.mor_cat())),
        dom: inline(functor_doc(d.ddom())),
        cod: inline(functor_doc(d.dcod())),
        identity: inline(functor_doc(d.did())),
        compose: inline(functor_doc(d.dcomp())),
    })
}

pub fn span_doc(s: &CofunctorSpan) -> Document {
    Document::Span(SpanDoc {
        apex: inline(category_doc(&s.apex)),
        left: inline(functor_doc(&s.left)),
        right: inline(functor_doc(&s.right)),
    })
}

pub fn triangle_doc(t: &LensTriangle) -> Document {
    Document::Triangle(TriangleDoc {
        apex: inline(category_doc(&t.apex)),
        left: inline(functor_doc(&t.left)),
        right: inline(functor_doc(&t.right)),
        base: inline(functor_doc(&t.base)),
    })
}
