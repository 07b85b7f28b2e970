//! Cofunctors `φ: B ⇸ A`.
//!
//! The object map runs `A₀ → B₀`, and every anchored update `(a, u)` with
//! `u: φ₀ a → b` in `B` is lifted to a morphism `φ₁(a, u)` of `A` out of `a`
//! ending at `p₀(a, u)`. The set of anchored updates `Λ₁` is computed from
//! `φ₀` and stored in a fixed order: grouped by `a`, then by the position of
//! `u` among the morphisms out of `φ₀ a`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{anchor_token, require, FinCategory, RawCategory};
use crate::error::{Error, Result, StructureError};
use crate::functor::{is_discrete_opfibration, is_identity_on_objects, FinFunctor};
use crate::report::ValidationReport;

/// The anchored updates `Λ₁ = {(a, u) : dom u = φ₀ a}` for a fixed object map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchors {
    offsets: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

impl Anchors {
    pub fn new(target: &FinCategory, source: &FinCategory, phi0: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(target.object_count() + 1);
        let mut pairs = Vec::new();
        for a in target.objects() {
            offsets.push(pairs.len());
            for &u in source.out(phi0[a]) {
                pairs.push((a, u));
            }
        }
        offsets.push(pairs.len());
        Anchors { offsets, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn get(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    /// Index of `(a, u)`; the caller guarantees `dom u = φ₀ a`.
    pub fn index(&self, source: &FinCategory, a: usize, u: usize) -> usize {
        self.offsets[a] + source.out_pos(u)
    }

    /// Index of `(a, u)` if `u` starts at `φ₀ a`.
    pub fn lookup(&self, source: &FinCategory, phi0: &[usize], a: usize, u: usize) -> Option<usize> {
        (source.dom(u) == phi0[a]).then(|| self.index(source, a, u))
    }

    pub fn of_object(&self, a: usize) -> std::ops::Range<usize> {
        self.offsets[a]..self.offsets[a + 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCofunctor {
    /// `A`, where lifts live.
    target: Arc<FinCategory>,
    /// `B`, where updates live.
    source: Arc<FinCategory>,
    phi0: Vec<usize>,
    anchors: Anchors,
    phi1: Vec<usize>,
    p0: Vec<usize>,
}

impl FinCofunctor {
    /// `phi1` and `p0` are indexed by anchored update, in [`Anchors`] order.
    pub fn new(
        target: Arc<FinCategory>,
        source: Arc<FinCategory>,
        phi0: Vec<usize>,
        phi1: Vec<usize>,
        p0: Vec<usize>,
    ) -> std::result::Result<Self, StructureError> {
        if phi0.len() != target.object_count() || phi0.iter().any(|&b| b >= source.object_count()) {
            return Err(StructureError::Malformed("phi0 must map every object of A into B".into()));
        }
        let anchors = Anchors::new(&target, &source, &phi0);
        if phi1.len() != anchors.len() || p0.len() != anchors.len() {
            return Err(StructureError::Malformed("phi1 and p0 must be keyed by the anchored updates".into()));
        }
        if phi1.iter().any(|&g| g >= target.morphism_count()) || p0.iter().any(|&a| a >= target.object_count()) {
            return Err(StructureError::Malformed("phi1 or p0 refers outside A".into()));
        }
        Ok(FinCofunctor { target, source, phi0, anchors, phi1, p0 })
    }

    /// Builds a cofunctor with `p0 = cod ∘ phi1`.
    pub fn with_inferred_p0(
        target: Arc<FinCategory>,
        source: Arc<FinCategory>,
        phi0: Vec<usize>,
        phi1: Vec<usize>,
    ) -> std::result::Result<Self, StructureError> {
        if phi1.iter().any(|&g| g >= target.morphism_count()) {
            return Err(StructureError::Malformed("phi1 refers outside A".into()));
        }
        let p0 = infer_p0(&target, &phi1);
        Self::new(target, source, phi0, phi1, p0)
    }

    /// Builds a cofunctor from named maps; `p0` and `phi1` are keyed by
    /// anchored-update tokens `a|u` and must cover `Λ₁` exactly.
    pub fn from_named<S: AsRef<str>>(
        target: Arc<FinCategory>,
        source: Arc<FinCategory>,
        phi0: &[(S, S)],
        p0: &[(S, S)],
        phi1: &[(S, S)],
    ) -> std::result::Result<Self, StructureError> {
        let mut obj = vec![None; target.object_count()];
        for (a, b) in phi0 {
            let i = target
                .obj_id(a.as_ref())
                .ok_or_else(|| StructureError::Undeclared { id: a.as_ref().into(), context: "keys of phi0".into() })?;
            let j = source.obj_id(b.as_ref()).ok_or_else(|| StructureError::Undeclared {
                id: b.as_ref().into(),
                context: "values of phi0".into(),
            })?;
            if obj[i].replace(j).is_some() {
                return Err(StructureError::ExtraEntry { map: "phi0".into(), key: a.as_ref().into() });
            }
        }
        let phi0: Vec<usize> = obj
            .into_iter()
            .enumerate()
            .map(|(i, j)| {
                j.ok_or_else(|| StructureError::MissingEntry { map: "phi0".into(), key: target.obj_name(i).into() })
            })
            .collect::<std::result::Result<_, _>>()?;
        let anchors = Anchors::new(&target, &source, &phi0);
        let keys: HashMap<String, usize> = anchors
            .pairs()
            .iter()
            .enumerate()
            .map(|(i, &(a, u))| (anchor_token(target.obj_name(a), source.mor_name(u)), i))
            .collect();
        let keyed = |map: &str, entries: &[(S, S)], value: &dyn Fn(&str) -> Option<usize>| {
            let mut out = vec![None; anchors.len()];
            for (k, v) in entries {
                let i = *keys
                    .get(k.as_ref())
                    .ok_or_else(|| StructureError::ExtraEntry { map: map.into(), key: k.as_ref().into() })?;
                let j = value(v.as_ref()).ok_or_else(|| StructureError::Undeclared {
                    id: v.as_ref().into(),
                    context: format!("values of {map}"),
                })?;
                if out[i].replace(j).is_some() {
                    return Err(StructureError::ExtraEntry { map: map.into(), key: k.as_ref().into() });
                }
            }
            out.into_iter()
                .enumerate()
                .map(|(i, j)| {
                    j.ok_or_else(|| {
                        let (a, u) = anchors.get(i);
                        StructureError::MissingEntry {
                            map: map.into(),
                            key: anchor_token(target.obj_name(a), source.mor_name(u)),
                        }
                    })
                })
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        let p0 = keyed("p0", p0, &|n| target.obj_id(n))?;
        let phi1 = keyed("phi1", phi1, &|n| target.mor_id(n))?;
        Ok(FinCofunctor { target, source, phi0, anchors, phi1, p0 })
    }

    pub fn identity(category: Arc<FinCategory>) -> Self {
        identity_cofunctor(&category)
    }

    /// `A`, the category receiving lifts.
    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    /// `B`, the category of updates.
    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn object_map(&self) -> &[usize] {
        &self.phi0
    }

    pub fn anchors(&self) -> &Anchors {
        &self.anchors
    }

    pub fn lifts(&self) -> &[usize] {
        &self.phi1
    }

    pub fn lift_codomains(&self) -> &[usize] {
        &self.p0
    }

    /// Anchor index of `(a, u)`, if `u` starts at `φ₀ a`.
    pub fn anchor(&self, a: usize, u: usize) -> Option<usize> {
        self.anchors.lookup(&self.source, &self.phi0, a, u)
    }

    /// `φ₁(a, u)`.
    pub fn lift(&self, a: usize, u: usize) -> Option<usize> {
        self.anchor(a, u).map(|i| self.phi1[i])
    }

    /// `p₀(a, u)`.
    pub fn transport(&self, a: usize, u: usize) -> Option<usize> {
        self.anchor(a, u).map(|i| self.p0[i])
    }

    pub fn anchor_name(&self, i: usize) -> String {
        let (a, u) = self.anchors.get(i);
        anchor_token(self.target.obj_name(a), self.source.mor_name(u))
    }

    pub fn validate(&self) -> ValidationReport {
        validate_cofunctor(self)
    }
}

/// `p₀ = cod ∘ φ₁`.
pub fn infer_p0(target: &FinCategory, phi1: &[usize]) -> Vec<usize> {
    phi1.iter().map(|&g| target.cod(g)).collect()
}

/// Checks compatibility, lift boundaries (including the stored `p₀` against
/// `cod ∘ φ₁`), preservation of identities and of composites over `Λ₂`.
pub fn validate_cofunctor(phi: &FinCofunctor) -> ValidationReport {
    let (a, b) = (&*phi.target, &*phi.source);
    let mut report = ValidationReport::new();
    for (i, &(x, u)) in phi.anchors.pairs().iter().enumerate() {
        let w = || vec![a.obj_name(x).to_string(), b.mor_name(u).to_string()];
        let lift = phi.phi1[i];
        if phi.phi0[phi.p0[i]] != b.cod(u) {
            report.fail("compatibility", w());
        }
        if a.dom(lift) != x {
            report.fail("lift-domain", w());
        }
        if a.cod(lift) != phi.p0[i] {
            report.fail("lift-codomain", w());
        }
    }
    for x in a.objects() {
        let i = phi.anchors.index(b, x, b.ident(phi.phi0[x]));
        if phi.phi1[i] != a.ident(x) {
            report.fail("identity", [a.obj_name(x)]);
        }
    }
    for (i, &(x, u)) in phi.anchors.pairs().iter().enumerate() {
        let moved = phi.p0[i];
        for &v in b.out(b.cod(u)) {
            // Missing anchors and non-composable lifts are boundary failures
            // already reported above.
            let Some(j) = phi.anchors.lookup(b, &phi.phi0, moved, v) else { continue };
            let vu = b.compose(u, v).expect("composable");
            let k = phi.anchors.index(b, x, vu);
            if let Some(composite) = a.compose(phi.phi1[i], phi.phi1[j]) {
                if composite != phi.phi1[k] {
                    report.fail("composition", [a.obj_name(x), b.mor_name(u), b.mor_name(v)]);
                }
            }
        }
    }
    report
}

pub fn identity_cofunctor(category: &Arc<FinCategory>) -> FinCofunctor {
    let phi0: Vec<usize> = category.objects().collect();
    let anchors = Anchors::new(category, category, &phi0);
    let phi1: Vec<usize> = anchors.pairs().iter().map(|&(_, u)| u).collect();
    let p0 = infer_p0(category, &phi1);
    FinCofunctor { target: category.clone(), source: category.clone(), phi0, anchors, phi1, p0 }
}

/// Composite `φ ∘ γ: C ⇸ A` of `φ: B ⇸ A` and `γ: C ⇸ B`.
///
/// An update `w` at `a` is first lifted through `γ` at `φ₀ a` and the result
/// is then lifted through `φ` at `a`.
pub fn compose_cofunctors(phi: &FinCofunctor, gamma: &FinCofunctor) -> Result<FinCofunctor> {
    require(phi.source == gamma.target, || {
        "the update category of the first cofunctor differs from the lift category of the second".into()
    })?;
    let b = &*phi.source;
    let c = &*gamma.source;
    let phi0: Vec<usize> = phi.phi0.iter().map(|&y| gamma.phi0[y]).collect();
    let anchors = Anchors::new(&phi.target, c, &phi0);
    let mut phi1 = Vec::with_capacity(anchors.len());
    let mut p0 = Vec::with_capacity(anchors.len());
    for &(x, w) in anchors.pairs() {
        let v = gamma.phi1[gamma.anchors.index(c, phi.phi0[x], w)];
        let i = phi
            .anchors
            .lookup(b, &phi.phi0, x, v)
            .ok_or_else(|| Error::Invalid { what: "cofunctor", report: validate_cofunctor(gamma) })?;
        phi1.push(phi.phi1[i]);
        p0.push(phi.p0[i]);
    }
    Ok(FinCofunctor { target: phi.target.clone(), source: gamma.source.clone(), phi0, anchors, phi1, p0 })
}

/// The category `Λ` on the objects of `A` whose morphisms are the anchored
/// updates: `(a, u): a → p₀(a, u)`, composed by composing updates.
pub fn lambda_category(phi: &FinCofunctor) -> Result<FinCategory> {
    phi.validate().into_result("cofunctor")?;
    let (a, b) = (&*phi.target, &*phi.source);
    let mut raw = RawCategory { objects: a.object_names().to_vec(), ..Default::default() };
    for (i, &(x, u)) in phi.anchors.pairs().iter().enumerate() {
        raw.add_morphism(anchor_token(a.obj_name(x), b.mor_name(u)), x, phi.p0[i]);
    }
    raw.ident = a.objects().map(|x| phi.anchors.index(b, x, b.ident(phi.phi0[x]))).collect();
    let (lambda, canon) = raw.finish(|i, j| {
        let (x, u) = phi.anchors.get(i);
        let (_, v) = phi.anchors.get(j);
        phi.anchors.index(b, x, b.compose(u, v).expect("composable"))
    })?;
    debug_assert!(canon.obj.iter().enumerate().all(|(i, &j)| i == j));
    Ok(lambda)
}

/// Span `B ← Λ → A` representing a cofunctor: the left leg is a discrete
/// opfibration and the right leg is identity on objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofunctorSpan {
    pub apex: Arc<FinCategory>,
    pub left: FinFunctor,
    pub right: FinFunctor,
}

impl CofunctorSpan {
    pub fn new(left: FinFunctor, right: FinFunctor) -> Result<Self> {
        require(left.source() == right.source(), || "span legs have different sources".into())?;
        Ok(CofunctorSpan { apex: left.source().clone(), left, right })
    }

    /// Checks both legs are functors, the left leg is a discrete
    /// opfibration and the right leg is identity on objects.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.left.validate().scoped("left");
        report.extend(self.right.validate().scoped("right"));
        report.extend(is_discrete_opfibration(&self.left).scoped("left"));
        if !is_identity_on_objects(&self.right) {
            report.fail("right.identity-on-objects", Vec::<String>::new());
        }
        report
    }

    /// Renames apex morphisms to the anchored-update token `a|u` of their
    /// domain and left image. Spans that differ only in apex morphism names
    /// have the same canonical form.
    pub fn canonical(&self) -> Result<CofunctorSpan> {
        let apex = &self.apex;
        let b = self.left.target();
        let names = apex
            .morphisms()
            .map(|g| anchor_token(apex.obj_name(apex.dom(g)), b.mor_name(self.left.on_morphism(g))))
            .collect();
        let (renamed, canon) = apex.relabel(apex.object_names().to_vec(), names)?;
        let renamed = Arc::new(renamed);
        let remap = |f: &FinFunctor| {
            let mut f1 = vec![0; f.morphism_map().len()];
            for (g, &v) in f.morphism_map().iter().enumerate() {
                f1[canon.mor[g]] = v;
            }
            let mut f0 = vec![0; f.object_map().len()];
            for (x, &y) in f.object_map().iter().enumerate() {
                f0[canon.obj[x]] = y;
            }
            FinFunctor::from_parts(renamed.clone(), f.target().clone(), f0, f1)
        };
        Ok(CofunctorSpan { apex: renamed.clone(), left: remap(&self.left), right: remap(&self.right) })
    }
}

pub fn span_of_cofunctor(phi: &FinCofunctor) -> Result<CofunctorSpan> {
    let lambda = Arc::new(lambda_category(phi)?);
    // Λ's morphisms are the anchors, re-sorted by token.
    let mut left1 = vec![0; lambda.morphism_count()];
    let mut right1 = vec![0; lambda.morphism_count()];
    for (i, &(x, u)) in phi.anchors.pairs().iter().enumerate() {
        let g = lambda.mor_id(&anchor_token(phi.target.obj_name(x), phi.source.mor_name(u))).expect("anchor token");
        left1[g] = u;
        right1[g] = phi.phi1[i];
    }
    let left = FinFunctor::from_parts(lambda.clone(), phi.source.clone(), phi.phi0.clone(), left1);
    let right = FinFunctor::from_parts(lambda.clone(), phi.target.clone(), lambda.objects().collect(), right1);
    Ok(CofunctorSpan { apex: lambda, left, right })
}

/// Reads a cofunctor off a span: `φ₁(a, u)` is the right image of the unique
/// left lift of `u` at `a`.
pub fn cofunctor_from_span(span: &CofunctorSpan) -> Result<FinCofunctor> {
    span.validate().into_result("cofunctor span")?;
    let apex = &*span.apex;
    let target = span.right.target().clone();
    let source = span.left.target().clone();
    let phi0 = span.left.object_map().to_vec();
    let anchors = Anchors::new(&target, &source, &phi0);
    let mut phi1 = Vec::with_capacity(anchors.len());
    for &(x, u) in anchors.pairs() {
        let g = crate::functor::unique_lift(&span.left, x, u)
            .ok_or_else(|| Error::Internal("discrete opfibration without a unique lift".into()))?;
        debug_assert_eq!(apex.dom(g), x);
        phi1.push(span.right.on_morphism(g));
    }
    let p0 = infer_p0(&target, &phi1);
    Ok(FinCofunctor { target, source, phi0, anchors, phi1, p0 })
}
