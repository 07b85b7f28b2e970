//! Lenses as a functor (Get) paired with a cofunctor (Put) sharing the
//! object map.

use std::sync::Arc;

use crate::category::{require, FinCategory};
use crate::cofunctor::{
    cofunctor_from_span, compose_cofunctors, identity_cofunctor, span_of_cofunctor, CofunctorSpan, FinCofunctor,
};
use crate::error::{Error, Result, StructureError};
use crate::functor::{
    compose_functors, is_discrete_opfibration, is_identity_on_objects, pullback_category, unique_lift, FinFunctor,
};
use crate::report::ValidationReport;

/// A lens `A ⇌ B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinLens {
    get: FinFunctor,
    put: FinCofunctor,
}

impl FinLens {
    /// Pairs a functor `A → B` with a cofunctor `B ⇸ A`.
    pub fn new(get: FinFunctor, put: FinCofunctor) -> std::result::Result<Self, StructureError> {
        if get.source() != put.target() || get.target() != put.source() {
            return Err(StructureError::Boundary("get and put do not connect the same pair of categories".into()));
        }
        Ok(FinLens { get, put })
    }

    pub fn identity(category: Arc<FinCategory>) -> Self {
        FinLens { get: FinFunctor::identity(category.clone()), put: identity_cofunctor(&category) }
    }

    pub fn get(&self) -> &FinFunctor {
        &self.get
    }

    pub fn put(&self) -> &FinCofunctor {
        &self.put
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        self.get.source()
    }

    pub fn view(&self) -> &Arc<FinCategory> {
        self.get.target()
    }

    pub fn into_parts(self) -> (FinFunctor, FinCofunctor) {
        (self.get, self.put)
    }

    /// Just the lens axiom; see [`FinLens::validate_all`].
    pub fn validate(&self) -> ValidationReport {
        validate_lens(self)
    }

    /// Get and put laws together with the lens axiom.
    pub fn validate_all(&self) -> ValidationReport {
        let mut report = self.get.validate().scoped("get");
        report.extend(self.put.validate().scoped("put"));
        report.extend(validate_lens(self));
        report
    }
}

/// Object maps agree, and each lift starts at its anchor and is sent by the
/// functor back to the update it lifts (Put-Get). Also checks `p₀ = cod∘φ₁`.
pub fn validate_lens(lens: &FinLens) -> ValidationReport {
    let (a, b) = (&**lens.source(), &**lens.view());
    let (get, put) = (&lens.get, &lens.put);
    let mut report = ValidationReport::new();
    for x in a.objects() {
        if get.on_object(x) != put.object_map()[x] {
            report.fail("object-map", [a.obj_name(x)]);
        }
    }
    for (i, &(x, u)) in put.anchors().pairs().iter().enumerate() {
        let lift = put.lifts()[i];
        if a.dom(lift) != x {
            report.fail("lift-domain", [a.obj_name(x), b.mor_name(u)]);
        }
        if get.on_morphism(lift) != u {
            report.fail("put-get", [a.obj_name(x), b.mor_name(u)]);
        }
        if put.lift_codomains()[i] != a.cod(lift) {
            report.fail("lift-codomain", [a.obj_name(x), b.mor_name(u)]);
        }
    }
    report
}

/// Forgetful accessors: a lens has an underlying functor, cofunctor and
/// object of objects.
pub fn lens_get(lens: &FinLens) -> &FinFunctor {
    &lens.get
}

pub fn lens_put(lens: &FinLens) -> &FinCofunctor {
    &lens.put
}

pub fn lens_objects(lens: &FinLens) -> &[String] {
    lens.source().object_names()
}

/// Triangle `A ← Λ → B` over `get: A → B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LensTriangle {
    pub apex: Arc<FinCategory>,
    /// Discrete opfibration `Λ → B`.
    pub right: FinFunctor,
    /// Identity-on-objects functor `Λ → A`.
    pub left: FinFunctor,
    pub base: FinFunctor,
}

impl LensTriangle {
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.left.validate().scoped("left");
        report.extend(self.right.validate().scoped("right"));
        report.extend(self.base.validate().scoped("base"));
        report.extend(is_discrete_opfibration(&self.right).scoped("right"));
        if !is_identity_on_objects(&self.left) {
            report.fail("left.identity-on-objects", Vec::<String>::new());
        }
        match compose_functors(&self.left, &self.base) {
            Ok(composite) if composite == self.right => {}
            _ => report.fail("commutes", Vec::<String>::new()),
        }
        report
    }
}

pub fn lens_triangle(lens: &FinLens) -> Result<LensTriangle> {
    lens.validate_all().into_result("lens")?;
    let span = span_of_cofunctor(&lens.put)?;
    let triangle = LensTriangle { apex: span.apex, right: span.left, left: span.right, base: lens.get.clone() };
    if compose_functors(&triangle.left, &triangle.base)? != triangle.right {
        return Err(Error::Internal("lens triangle does not commute".into()));
    }
    Ok(triangle)
}

/// Composite `A ⇌ C` of `first: A ⇌ B` and `second: B ⇌ C`.
///
/// The componentwise composite is returned. It is cross-checked against the
/// composite read off the pullback of the two triangles, and any
/// disagreement is reported as an internal error.
pub fn compose_lenses(first: &FinLens, second: &FinLens) -> Result<FinLens> {
    require(first.view() == second.source(), || "view of the first lens differs from the source of the second".into())?;
    first.validate_all().into_result("lens")?;
    second.validate_all().into_result("lens")?;
    let get = compose_functors(&first.get, &second.get)?;
    let put = compose_cofunctors(&first.put, &second.put)?;
    let composite = FinLens { get, put };
    let via_span = compose_lenses_via_pullback(first, second)?;
    if via_span != composite {
        return Err(Error::Internal("componentwise and pullback lens composites disagree".into()));
    }
    Ok(composite)
}

/// Lens composite computed from the pullback `Λ ×_B Ω` of the two triangles.
pub fn compose_lenses_via_pullback(first: &FinLens, second: &FinLens) -> Result<FinLens> {
    let t1 = lens_triangle(first)?;
    let t2 = lens_triangle(second)?;
    let pb = pullback_category(&t1.right, &t2.left)?;
    let to_a = compose_functors(&pb.proj_left, &t1.left)?;
    let to_c = compose_functors(&pb.proj_right, &t2.right)?;
    if !to_a.is_bijective_on_objects() {
        return Err(Error::Internal("pullback apex is not bijective on objects over A".into()));
    }
    // Rename apex objects along the bijection to A, making the leg to A
    // identity on objects.
    let apex = &pb.apex;
    let a = first.source();
    let obj_names = apex.objects().map(|p| a.obj_name(to_a.on_object(p)).to_string()).collect();
    let (renamed, canon) = apex.relabel(obj_names, apex.morphism_names().to_vec())?;
    let renamed = Arc::new(renamed);
    let remap = |f: &FinFunctor| {
        let mut f0 = vec![0; f.object_map().len()];
        for (x, &y) in f.object_map().iter().enumerate() {
            f0[canon.obj[x]] = y;
        }
        let mut f1 = vec![0; f.morphism_map().len()];
        for (g, &v) in f.morphism_map().iter().enumerate() {
            f1[canon.mor[g]] = v;
        }
        FinFunctor::from_parts(renamed.clone(), f.target().clone(), f0, f1)
    };
    let span = CofunctorSpan::new(remap(&to_c), remap(&to_a))?;
    let put = cofunctor_from_span(&span)?;
    let get = compose_functors(&first.get, &second.get)?;
    Ok(FinLens::new(get, put)?)
}

/// The lens whose put lifts each update to its unique lift.
pub fn dopf_to_lens(f: &FinFunctor) -> Result<FinLens> {
    f.validate().into_result("functor")?;
    is_discrete_opfibration(f).into_result("discrete opfibration")?;
    let (a, b) = (f.source(), f.target());
    let phi0 = f.object_map().to_vec();
    let anchors = crate::cofunctor::Anchors::new(a, b, &phi0);
    let phi1 = anchors.pairs().iter().map(|&(x, u)| unique_lift(f, x, u).expect("discrete opfibration")).collect();
    let put = FinCofunctor::with_inferred_p0(a.clone(), b.clone(), phi0, phi1)?;
    Ok(FinLens::new(f.clone(), put)?)
}

/// Classical delta-lens laws over a get functor and a put assignment, stated
/// without reference to cofunctors: Put-Get, Get-Put and Put-Put. Used as an
/// independent check of [`FinLens::validate_all`].
pub fn d_lens_laws(lens: &FinLens) -> ValidationReport {
    let (a, b) = (&**lens.source(), &**lens.view());
    let (get, put) = (&lens.get, &lens.put);
    let mut report = get.validate().scoped("get");
    let lift = |x: usize, u: usize| put.lift(x, u);
    for x in a.objects() {
        let fx = get.on_object(x);
        for &u in b.out(fx) {
            let Some(g) = lift(x, u) else { continue };
            if a.dom(g) != x || get.on_morphism(g) != u {
                report.fail("put-get", [a.obj_name(x), b.mor_name(u)]);
            }
        }
        match lift(x, b.ident(fx)) {
            Some(g) if g == a.ident(x) => {}
            _ => report.fail("get-put", [a.obj_name(x)]),
        }
    }
    if get.object_map() != put.object_map() {
        report.fail("object-map", Vec::<String>::new());
    }
    for x in a.objects() {
        for &u in b.out(get.on_object(x)) {
            let Some(g) = lift(x, u) else { continue };
            let moved = a.cod(g);
            for &v in b.out(b.cod(u)) {
                let vu = b.compose(u, v).expect("composable");
                let whole = lift(x, vu);
                let step = lift(moved, v).and_then(|h| a.compose(g, h));
                if whole.is_none() || whole != step {
                    report.fail("put-put", [a.obj_name(x), b.mor_name(u), b.mor_name(v)]);
                }
            }
        }
    }
    report
}
