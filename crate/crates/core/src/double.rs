//! Double categories as categories internal to `Cat`: the category of
//! objects, the category of morphisms, and boundary, unit and composition
//! functors between them. Includes the double category of commutative
//! squares and the lens of double categories induced by a split opfibration.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{require, terminal, ArrowCategory, FinCategory, Square};
use crate::cofunctor::Anchors;
use crate::enumerate::{pairs_by_last, SearchBudget};
use crate::error::{Error, Result, StructureError};
use crate::functor::{arrow_legs, comma_category, compose_functors, pullback_category, FinFunctor, PullbackCategory};
use crate::report::ValidationReport;

fn then(f: &FinFunctor, g: &FinFunctor) -> FinFunctor {
    compose_functors(f, g).expect("matching boundaries")
}

/// Records every source element at which two parallel functors differ.
fn agree(report: &mut ValidationReport, law: &str, lhs: &FinFunctor, rhs: &FinFunctor) {
    let c = &**lhs.source();
    if lhs.target() != rhs.target() {
        report.fail(law, ["targets differ"]);
        return;
    }
    for x in c.objects() {
        if lhs.on_object(x) != rhs.on_object(x) {
            report.fail(law, [c.obj_name(x)]);
        }
    }
    for g in c.morphisms() {
        if lhs.on_morphism(g) != rhs.on_morphism(g) {
            report.fail(law, [c.mor_name(g)]);
        }
    }
}

/// A category internal to `Cat`.
#[derive(Debug, Clone)]
pub struct FinDoubleCategory {
    obj_cat: Arc<FinCategory>,
    mor_cat: Arc<FinCategory>,
    ddom: FinFunctor,
    dcod: FinFunctor,
    did: FinFunctor,
    dcomp: FinFunctor,
    composable: PullbackCategory,
}

impl PartialEq for FinDoubleCategory {
    fn eq(&self, other: &Self) -> bool {
        self.ddom == other.ddom && self.dcod == other.dcod && self.did == other.did && self.dcomp == other.dcomp
    }
}

impl Eq for FinDoubleCategory {}

impl FinDoubleCategory {
    /// `dcomp` must have the pullback of `dcod` and `ddom` as its source, in
    /// the form produced by [`pullback_category`].
    pub fn new(ddom: FinFunctor, dcod: FinFunctor, did: FinFunctor, dcomp: FinFunctor) -> Result<Self> {
        let composable = pullback_category(&dcod, &ddom)?;
        Self::assemble(ddom, dcod, did, dcomp, composable)
    }

    fn assemble(
        ddom: FinFunctor,
        dcod: FinFunctor,
        did: FinFunctor,
        dcomp: FinFunctor,
        composable: PullbackCategory,
    ) -> Result<Self> {
        let obj_cat = ddom.target().clone();
        let mor_cat = ddom.source().clone();
        require(dcod.source() == &mor_cat && dcod.target() == &obj_cat, || {
            "domain and codomain functors have different boundaries".into()
        })?;
        require(did.source() == &obj_cat && did.target() == &mor_cat, || {
            "unit functor does not go from objects to morphisms".into()
        })?;
        require(dcomp.source() == &composable.apex && dcomp.target() == &mor_cat, || {
            "composition functor is not defined on composable pairs".into()
        })?;
        Ok(FinDoubleCategory { obj_cat, mor_cat, ddom, dcod, did, dcomp, composable })
    }

    /// The double category with one object, one morphism and one square.
    pub fn terminal() -> Self {
        squares_double_category(&terminal()).expect("terminal is valid")
    }

    pub fn obj_cat(&self) -> &Arc<FinCategory> {
        &self.obj_cat
    }

    pub fn mor_cat(&self) -> &Arc<FinCategory> {
        &self.mor_cat
    }

    pub fn ddom(&self) -> &FinFunctor {
        &self.ddom
    }

    pub fn dcod(&self) -> &FinFunctor {
        &self.dcod
    }

    pub fn did(&self) -> &FinFunctor {
        &self.did
    }

    pub fn dcomp(&self) -> &FinFunctor {
        &self.dcomp
    }

    /// Pullback of `dcod` and `ddom`, the source of `dcomp`.
    pub fn composable(&self) -> &PullbackCategory {
        &self.composable
    }

    pub fn validate(&self) -> ValidationReport {
        validate_double_category(self)
    }

    /// Same structure with a replaced composition functor.
    pub fn with_dcomp(&self, dcomp: FinFunctor) -> Result<Self> {
        Self::assemble(self.ddom.clone(), self.dcod.clone(), self.did.clone(), dcomp, self.composable.clone())
    }
}

/// Unit, boundary and associativity equations as equalities of composite
/// functors, after checking every component.
pub fn validate_double_category(d: &FinDoubleCategory) -> ValidationReport {
    let mut report = d.obj_cat.validate().scoped("objects");
    report.extend(d.mor_cat.validate().scoped("morphisms"));
    for (name, f) in [("dom", &d.ddom), ("cod", &d.dcod), ("unit", &d.did), ("comp", &d.dcomp)] {
        report.extend(f.validate().scoped(name));
    }
    if !report.is_valid() {
        return report;
    }
    let id_obj = FinFunctor::identity(d.obj_cat.clone());
    let id_mor = FinFunctor::identity(d.mor_cat.clone());
    let (p1, p2) = (&d.composable.proj_left, &d.composable.proj_right);
    agree(&mut report, "unit.dom", &then(&d.did, &d.ddom), &id_obj);
    agree(&mut report, "unit.cod", &then(&d.did, &d.dcod), &id_obj);
    agree(&mut report, "composite.dom", &then(&d.dcomp, &d.ddom), &then(p1, &d.ddom));
    agree(&mut report, "composite.cod", &then(&d.dcomp, &d.dcod), &then(p2, &d.dcod));
    if !report.is_valid() {
        return report;
    }
    let pair = |h: &FinFunctor, k: &FinFunctor| d.composable.pairing(h, k).expect("boundary laws hold");
    let left = pair(&then(&d.ddom, &d.did), &id_mor);
    agree(&mut report, "unit.left", &then(&left, &d.dcomp), &id_mor);
    let right = pair(&id_mor, &then(&d.dcod, &d.did));
    agree(&mut report, "unit.right", &then(&right, &d.dcomp), &id_mor);

    // Both bracketings agree on every composable triple, evaluated pointwise
    // so the triple pullback is never materialised.
    let q = &*d.composable.apex;
    let mor = &*d.mor_cat;
    for o in q.objects() {
        let (x, y) = (p1.on_object(o), p2.on_object(o));
        let xy = d.dcomp.on_object(o);
        for z in mor.objects().filter(|&z| d.ddom.on_object(z) == d.dcod.on_object(y)) {
            let yz = d.dcomp.on_object(d.composable.object_of(y, z).expect("composable"));
            let lhs = d.dcomp.on_object(d.composable.object_of(xy, z).expect("composable"));
            let rhs = d.dcomp.on_object(d.composable.object_of(x, yz).expect("composable"));
            if lhs != rhs {
                report.fail("associativity", [mor.obj_name(x), mor.obj_name(y), mor.obj_name(z)]);
            }
        }
    }
    for m in q.morphisms() {
        let (x, y) = (p1.on_morphism(m), p2.on_morphism(m));
        let xy = d.dcomp.on_morphism(m);
        for z in mor.morphisms().filter(|&z| d.ddom.on_morphism(z) == d.dcod.on_morphism(y)) {
            let yz = d.dcomp.on_morphism(d.composable.morphism_of(y, z).expect("composable"));
            let lhs = d.dcomp.on_morphism(d.composable.morphism_of(xy, z).expect("composable"));
            let rhs = d.dcomp.on_morphism(d.composable.morphism_of(x, yz).expect("composable"));
            if lhs != rhs {
                report.fail("associativity", [mor.mor_name(x), mor.mor_name(y), mor.mor_name(z)]);
            }
        }
    }
    report
}

/// A morphism of double categories: functors on objects and on morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleFunctor {
    source: Arc<FinDoubleCategory>,
    target: Arc<FinDoubleCategory>,
    on_obj: FinFunctor,
    on_mor: FinFunctor,
}

impl DoubleFunctor {
    pub fn new(
        source: Arc<FinDoubleCategory>,
        target: Arc<FinDoubleCategory>,
        on_obj: FinFunctor,
        on_mor: FinFunctor,
    ) -> std::result::Result<Self, StructureError> {
        if on_obj.source() != &source.obj_cat
            || on_obj.target() != &target.obj_cat
            || on_mor.source() != &source.mor_cat
            || on_mor.target() != &target.mor_cat
        {
            return Err(StructureError::Boundary("component functors do not match the double categories".into()));
        }
        Ok(DoubleFunctor { source, target, on_obj, on_mor })
    }

    pub fn identity(d: Arc<FinDoubleCategory>) -> Self {
        let on_obj = FinFunctor::identity(d.obj_cat.clone());
        let on_mor = FinFunctor::identity(d.mor_cat.clone());
        DoubleFunctor { source: d.clone(), target: d, on_obj, on_mor }
    }

    pub fn source(&self) -> &Arc<FinDoubleCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinDoubleCategory> {
        &self.target
    }

    pub fn on_obj(&self) -> &FinFunctor {
        &self.on_obj
    }

    pub fn on_mor(&self) -> &FinFunctor {
        &self.on_mor
    }

    pub fn validate(&self) -> ValidationReport {
        validate_double_functor(self)
    }
}

/// Both components are functors and they commute with the domain, codomain,
/// unit and composition functors.
pub fn validate_double_functor(f: &DoubleFunctor) -> ValidationReport {
    let (s, t) = (&*f.source, &*f.target);
    let mut report = f.on_obj.validate().scoped("objects");
    report.extend(f.on_mor.validate().scoped("morphisms"));
    if !report.is_valid() {
        return report;
    }
    agree(&mut report, "dom", &then(&f.on_mor, &t.ddom), &then(&s.ddom, &f.on_obj));
    agree(&mut report, "cod", &then(&f.on_mor, &t.dcod), &then(&s.dcod, &f.on_obj));
    agree(&mut report, "unit", &then(&s.did, &f.on_mor), &then(&f.on_obj, &t.did));
    if !report.is_valid() {
        return report;
    }
    let (p1, p2) = (&s.composable.proj_left, &s.composable.proj_right);
    match t.composable.pairing(&then(p1, &f.on_mor), &then(p2, &f.on_mor)) {
        Ok(pair) => agree(&mut report, "composition", &then(&s.dcomp, &f.on_mor), &then(&pair, &t.dcomp)),
        Err(e) => report.fail("composition", [e.to_string()]),
    }
    report
}

/// `first` followed by `second`.
pub fn compose_double_functors(first: &DoubleFunctor, second: &DoubleFunctor) -> Result<DoubleFunctor> {
    require(first.target == second.source, || {
        "target of the first double functor differs from the source of the second".into()
    })?;
    Ok(DoubleFunctor {
        source: first.source.clone(),
        target: second.target.clone(),
        on_obj: compose_functors(&first.on_obj, &second.on_obj)?,
        on_mor: compose_functors(&first.on_mor, &second.on_mor)?,
    })
}

/// The commuting square `d0 ∘ on_mor = on_obj ∘ d0` is a pullback: the
/// comparison from the source morphisms into the pullback is bijective.
pub fn is_internal_dopf(f: &DoubleFunctor) -> ValidationReport {
    let (s, t) = (&*f.source, &*f.target);
    let mut report = ValidationReport::new();
    let pb = match pullback_category(&f.on_obj, &t.ddom) {
        Ok(pb) => pb,
        Err(e) => {
            report.fail("internal-dopf", [e.to_string()]);
            return report;
        }
    };
    let cmp = match pb.pairing(&s.ddom, &f.on_mor) {
        Ok(cmp) => cmp,
        Err(e) => {
            report.fail("internal-dopf", [e.to_string()]);
            return report;
        }
    };
    let apex = &*pb.apex;
    let mut hits = vec![0usize; apex.object_count()];
    for &y in cmp.object_map() {
        hits[y] += 1;
    }
    for (y, &k) in hits.iter().enumerate() {
        if k != 1 {
            report.fail("internal-dopf", [apex.obj_name(y).to_string(), format!("preimages={k}")]);
        }
    }
    let mut hits = vec![0usize; apex.morphism_count()];
    for &y in cmp.morphism_map() {
        hits[y] += 1;
    }
    for (y, &k) in hits.iter().enumerate() {
        if k != 1 {
            report.fail("internal-dopf", [apex.mor_name(y).to_string(), format!("preimages={k}")]);
        }
    }
    report
}

/// Squares double category with the lookup from squares to morphism indices.
struct SquaresParts {
    double: Arc<FinDoubleCategory>,
    squares: Vec<Square>,
    index: HashMap<Square, usize>,
}

fn squares_parts(base: &Arc<FinCategory>) -> Result<SquaresParts> {
    let arrow = ArrowCategory::build(base)?;
    let (l, r) = arrow_legs(&arrow, base);
    let mor_cat = l.source().clone();
    let index: HashMap<Square, usize> = arrow.squares.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let did_f0 = base.objects().map(|b| base.ident(b)).collect();
    let did_f1 = base
        .morphisms()
        .map(|g| {
            let (d, c) = (base.ident(base.dom(g)), base.ident(base.cod(g)));
            index[&Square { f: d, g: c, u: g, v: g }]
        })
        .collect();
    let did = FinFunctor::new(base.clone(), mor_cat.clone(), did_f0, did_f1)?;
    let composable = pullback_category(&r, &l)?;
    let (p1, p2) = (&composable.proj_left, &composable.proj_right);
    let apex = &*composable.apex;
    let f0 =
        apex.objects().map(|o| base.compose(p1.on_object(o), p2.on_object(o)).expect("composable arrows")).collect();
    let f1 = apex
        .morphisms()
        .map(|m| {
            let (s, t) = (arrow.squares[p1.on_morphism(m)], arrow.squares[p2.on_morphism(m)]);
            index[&Square {
                f: base.compose(s.f, t.f).expect("composable"),
                g: base.compose(s.g, t.g).expect("composable"),
                u: s.u,
                v: t.v,
            }]
        })
        .collect();
    let dcomp = FinFunctor::new(composable.apex.clone(), mor_cat, f0, f1)?;
    let double = FinDoubleCategory::assemble(l, r, did, dcomp, composable)?;
    Ok(SquaresParts { double: Arc::new(double), squares: arrow.squares, index })
}

/// Objects and morphisms of `base`; commutative squares pasted side by side.
/// The domain and codomain functors send a square `(f, g, u, v)` to `u` and
/// `v` respectively.
pub fn squares_double_category(base: &FinCategory) -> Result<FinDoubleCategory> {
    let parts = squares_parts(&Arc::new(base.clone()))?;
    Ok(Arc::try_unwrap(parts.double).unwrap_or_else(|d| (*d).clone()))
}

/// A chosen lift for each `(a, u)` with `u` starting at `F a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftTable {
    anchors: Anchors,
    lifts: Vec<usize>,
}

impl LiftTable {
    /// `lifts` is ordered like the anchors of `F`: by object, then by the
    /// position of the update among the morphisms out of `F a`.
    pub fn new(f: &FinFunctor, lifts: Vec<usize>) -> std::result::Result<Self, StructureError> {
        let (a, b) = (&**f.source(), &**f.target());
        let anchors = Anchors::new(a, b, f.object_map());
        if lifts.len() != anchors.len() {
            return Err(StructureError::Malformed(format!(
                "lift table has {} entries, expected {}",
                lifts.len(),
                anchors.len()
            )));
        }
        for (i, &(x, u)) in anchors.pairs().iter().enumerate() {
            let g = lifts[i];
            if g >= a.morphism_count() || a.dom(g) != x || f.on_morphism(g) != u {
                return Err(StructureError::Malformed(format!(
                    "lift of `{}` at `{}` is not a morphism out of `{}` over it",
                    b.mor_name(u),
                    a.obj_name(x),
                    a.obj_name(x)
                )));
            }
        }
        Ok(LiftTable { anchors, lifts })
    }

    pub fn from_fn(f: &FinFunctor, lift: impl Fn(usize, usize) -> usize) -> std::result::Result<Self, StructureError> {
        let anchors = Anchors::new(f.source(), f.target(), f.object_map());
        let lifts = anchors.pairs().iter().map(|&(x, u)| lift(x, u)).collect();
        LiftTable::new(f, lifts)
    }

    pub fn anchors(&self) -> &Anchors {
        &self.anchors
    }

    pub fn lifts(&self) -> &[usize] {
        &self.lifts
    }

    /// Lift of `u` at `a`; `b` is the base category.
    pub fn lift(&self, b: &FinCategory, a: usize, u: usize) -> usize {
        self.lifts[self.anchors.index(b, a, u)]
    }
}

/// Checks that the chosen lifts form a split opfibration structure on `F`:
/// identities lift to identities, lifts compose, and each lift is
/// opcartesian (every factorisation of the image is filled uniquely).
pub fn is_split_opfibration(f: &FinFunctor, table: &LiftTable) -> Result<ValidationReport> {
    f.validate().into_result("functor")?;
    let (a, b) = (&**f.source(), &**f.target());
    if table.anchors != Anchors::new(a, b, f.object_map()) {
        return Err(StructureError::Malformed("lift table belongs to a different functor".into()).into());
    }
    let mut report = ValidationReport::new();
    for &(x, u) in table.anchors.pairs() {
        let l = table.lift(b, x, u);
        if b.is_identity(u) && l != a.ident(x) {
            report.fail("identity-lift", [a.obj_name(x)]);
        }
        let x2 = a.cod(l);
        for &v in b.out(b.cod(u)) {
            let vu = b.compose(u, v).expect("composable");
            let composite = a.compose(l, table.lift(b, x2, v)).expect("composable");
            if table.lift(b, x, vu) != composite {
                report.fail("split", [a.obj_name(x), b.mor_name(u), b.mor_name(v)]);
            }
        }
        for &g in a.out(x) {
            for v in b.hom(b.cod(u), f.on_object(a.cod(g))) {
                if b.compose(u, v) != Some(f.on_morphism(g)) {
                    continue;
                }
                let fills =
                    a.hom(x2, a.cod(g)).filter(|&h| a.compose(l, h) == Some(g) && f.on_morphism(h) == v).count();
                if fills != 1 {
                    report.fail(
                        "opcartesian",
                        [
                            a.obj_name(x).to_string(),
                            b.mor_name(u).to_string(),
                            a.mor_name(g).to_string(),
                            b.mor_name(v).to_string(),
                            format!("fills={fills}"),
                        ],
                    );
                }
            }
        }
    }
    Ok(report)
}

/// Every double functor `source → target` whose object component is
/// `on_obj`, found by exhaustive search over morphism components.
pub fn double_functors_over(
    source: &Arc<FinDoubleCategory>,
    target: &Arc<FinDoubleCategory>,
    on_obj: &FinFunctor,
    budget: &mut SearchBudget,
) -> Result<Vec<DoubleFunctor>> {
    require(on_obj.source() == &source.obj_cat && on_obj.target() == &target.obj_cat, || {
        "object component does not match the double categories".into()
    })?;
    let (s, t) = (&*source.mor_cat, &*target.mor_cat);
    let mut obj_cands: Vec<Vec<usize>> = s
        .objects()
        .map(|x| {
            let d = on_obj.on_object(source.ddom.on_object(x));
            let c = on_obj.on_object(source.dcod.on_object(x));
            t.objects().filter(|&y| target.ddom.on_object(y) == d && target.dcod.on_object(y) == c).collect()
        })
        .collect();
    for o in source.obj_cat.objects() {
        let forced = target.did.on_object(on_obj.on_object(o));
        let slot = &mut obj_cands[source.did.on_object(o)];
        slot.retain(|&y| y == forced);
    }
    let search = MorSearch { source, target, on_obj, obj_cands, checks: pairs_by_last(s) };
    let mut out = Vec::new();
    let mut y0 = vec![usize::MAX; s.object_count()];
    search.objects(0, &mut y0, budget, &mut out)?;
    Ok(out)
}

struct MorSearch<'a> {
    source: &'a Arc<FinDoubleCategory>,
    target: &'a Arc<FinDoubleCategory>,
    on_obj: &'a FinFunctor,
    obj_cands: Vec<Vec<usize>>,
    checks: Vec<Vec<(usize, usize, usize)>>,
}

impl MorSearch<'_> {
    fn morphism_candidates(&self, m: usize, y0: &[usize]) -> Vec<usize> {
        let (s, t) = (&*self.source.mor_cat, &*self.target.mor_cat);
        let (d, c) = (y0[s.dom(m)], y0[s.cod(m)]);
        if s.is_identity(m) {
            return vec![t.ident(d)];
        }
        let u = self.on_obj.on_morphism(self.source.ddom.on_morphism(m));
        let v = self.on_obj.on_morphism(self.source.dcod.on_morphism(m));
        t.hom(d, c).filter(|&n| self.target.ddom.on_morphism(n) == u && self.target.dcod.on_morphism(n) == v).collect()
    }

    fn objects(
        &self,
        x: usize,
        y0: &mut Vec<usize>,
        budget: &mut SearchBudget,
        out: &mut Vec<DoubleFunctor>,
    ) -> Result<()> {
        let s = &*self.source.mor_cat;
        if x == y0.len() {
            let mut y1 = vec![usize::MAX; s.morphism_count()];
            return self.morphisms(0, y0, &mut y1, budget, out);
        }
        for &y in &self.obj_cands[x] {
            budget.tick()?;
            y0[x] = y;
            // Every morphism between assigned objects needs some image.
            let feasible = s.morphisms().all(|m| {
                let (d, c) = (s.dom(m), s.cod(m));
                (d != x && c != x) || d > x || c > x || !self.morphism_candidates(m, y0).is_empty()
            });
            if feasible {
                self.objects(x + 1, y0, budget, out)?;
            }
        }
        y0[x] = usize::MAX;
        Ok(())
    }

    fn morphisms(
        &self,
        m: usize,
        y0: &[usize],
        y1: &mut Vec<usize>,
        budget: &mut SearchBudget,
        out: &mut Vec<DoubleFunctor>,
    ) -> Result<()> {
        let t = &*self.target.mor_cat;
        if m == y1.len() {
            let on_mor =
                FinFunctor::new(self.source.mor_cat.clone(), self.target.mor_cat.clone(), y0.to_vec(), y1.clone())?;
            let f = DoubleFunctor::new(self.source.clone(), self.target.clone(), self.on_obj.clone(), on_mor)?;
            if f.validate().is_valid() {
                out.push(f);
            }
            return Ok(());
        }
        for n in self.morphism_candidates(m, y0) {
            budget.tick()?;
            y1[m] = n;
            if self.checks[m].iter().all(|&(p, q, r)| t.compose(y1[p], y1[q]) == Some(y1[r])) {
                self.morphisms(m + 1, y0, y1, budget, out)?;
            }
        }
        y1[m] = usize::MAX;
        Ok(())
    }
}

/// A lens of double categories presented as a commuting triangle: `left` is
/// identity on objects, `right` is an internal discrete opfibration, and
/// `left` followed by `get` is `right`.
#[derive(Debug, Clone)]
pub struct InternalLens {
    pub source: Arc<FinDoubleCategory>,
    pub view: Arc<FinDoubleCategory>,
    pub apex: Arc<FinDoubleCategory>,
    pub get: DoubleFunctor,
    pub left: DoubleFunctor,
    pub right: DoubleFunctor,
    /// Double functors `apex → source` over the identity whose composite
    /// with `get` is an internal discrete opfibration.
    pub left_candidates: usize,
}

impl InternalLens {
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.apex.validate().scoped("apex");
        report.extend(self.get.validate().scoped("get"));
        report.extend(self.left.validate().scoped("left"));
        report.extend(self.right.validate().scoped("right"));
        if !report.is_valid() {
            return report;
        }
        if self.left.on_obj != FinFunctor::identity(self.apex.obj_cat.clone()) {
            report.fail("identity-on-objects", ["left"]);
        }
        match compose_double_functors(&self.left, &self.get) {
            Ok(c) if c == self.right => {}
            Ok(c) => {
                agree(&mut report, "commutes", &c.on_obj, &self.right.on_obj);
                agree(&mut report, "commutes", &c.on_mor, &self.right.on_mor);
            }
            Err(e) => report.fail("commutes", [e.to_string()]),
        }
        report.extend(is_internal_dopf(&self.right));
        report
    }
}

/// Product projection `A × X → A` together with the functor `P` out of its
/// comma category sending `((a, x), u)` to `(cod u, x)`.
pub fn product_projection(a: &Arc<FinCategory>, fibre: &Arc<FinCategory>) -> Result<(FinFunctor, FinFunctor)> {
    let t = Arc::new(terminal());
    let pb = pullback_category(
        &FinFunctor::to_terminal(a.clone(), t.clone())?,
        &FinFunctor::to_terminal(fibre.clone(), t)?,
    )?;
    let (proj, rest) = (&pb.proj_left, &pb.proj_right);
    let comma = comma_category(proj)?;
    let c = &*comma.apex;
    let base = &**a;
    let f0 = c
        .objects()
        .map(|o| {
            let (e, u) = comma.object_parts[o];
            pb.object_of(base.cod(u), rest.on_object(e)).expect("product object")
        })
        .collect();
    let f1 = c
        .morphisms()
        .map(|m| {
            let (g, v) = comma.morphism_parts[m];
            pb.morphism_of(v, rest.on_morphism(g)).expect("product morphism")
        })
        .collect();
    let p = FinFunctor::new(comma.apex.clone(), pb.apex.clone(), f0, f1)?;
    Ok((proj.clone(), p))
}

/// Reads the chosen lifts off `P: F/B → A`. Requires `F∘P` to be the
/// codomain projection and `P` to fix the objects `(a, id)` and morphisms
/// `(g, F g)`; then `lift(a, u)` is the image of `(id_a, u): (a, id) → (a, u)`.
pub fn clens_lift_table(f: &FinFunctor, p: &FinFunctor) -> Result<LiftTable> {
    f.validate().into_result("functor")?;
    let a = f.source();
    let comma = comma_category(f)?;
    require(p.source() == &comma.apex && p.target() == a, || {
        "the lift functor must go from the comma category of F to the source of F".into()
    })?;
    p.validate().into_result("lift functor")?;
    let mut report = ValidationReport::new();
    agree(&mut report, "over-codomain", &then(p, f), &comma.r);
    let unit = comma_unit(f, &comma)?;
    agree(&mut report, "unit", &then(&unit, p), &FinFunctor::identity(a.clone()));
    report.into_result("c-lens")?;
    let lift_at = |x: usize, u: usize| {
        let target = comma.object_of(x, u).expect("comma object");
        let m = comma.morphism_between(unit.on_object(x), target, a.ident(x), u).expect("generator");
        p.on_morphism(m)
    };
    Ok(LiftTable::from_fn(f, lift_at)?)
}

/// `A → F/B` sending `a` to `(a, id)` and `g` to `(g, F g)`.
fn comma_unit(f: &FinFunctor, comma: &crate::functor::CommaCategory) -> Result<FinFunctor> {
    let (a, b) = (f.source(), f.target());
    let f0: Vec<usize> =
        a.objects().map(|x| comma.object_of(x, b.ident(f.on_object(x))).expect("unit object")).collect();
    let f1 = a
        .morphisms()
        .map(|g| comma.morphism_between(f0[a.dom(g)], f0[a.cod(g)], g, f.on_morphism(g)).expect("unit morphism"))
        .collect();
    Ok(FinFunctor::new(a.clone(), comma.apex.clone(), f0, f1)?)
}

/// Builds the lens of squares double categories induced by `F: A → B` and a
/// functor `P: F/B → A` encoding chosen opcartesian lifts, and checks that
/// the connecting double functors are the only ones of their kind.
pub fn clens_to_internal_lens(f: &FinFunctor, p: &FinFunctor, budget: &mut SearchBudget) -> Result<InternalLens> {
    let table = clens_lift_table(f, p)?;
    is_split_opfibration(f, &table)?.into_result("split opfibration")?;
    let a = f.source().clone();
    let b = f.target().clone();
    let comma = comma_category(f)?;
    let c = &*comma.apex;
    let unit = comma_unit(f, &comma)?;
    let lift_of = |o: usize| {
        let (x, u) = comma.object_parts[o];
        table.lift(&b, x, u)
    };
    let mut report = ValidationReport::new();
    for m in c.morphisms() {
        let (g, _) = comma.morphism_parts[m];
        let (s, t) = (c.dom(m), c.cod(m));
        if a.compose(lift_of(s), p.on_morphism(m)) != a.compose(g, lift_of(t)) {
            report.fail("lift-naturality", [c.mor_name(m)]);
        }
    }
    report.into_result("c-lens")?;

    let sa = squares_parts(&a)?;
    let sb = squares_parts(&b)?;

    // get: A → B on objects, ΦF on squares.
    let get_f1 = sa
        .squares
        .iter()
        .map(|s| {
            let sq =
                Square { f: f.on_morphism(s.f), g: f.on_morphism(s.g), u: f.on_morphism(s.u), v: f.on_morphism(s.v) };
            sb.index[&sq]
        })
        .collect();
    let get_mor =
        FinFunctor::new(sa.double.mor_cat.clone(), sb.double.mor_cat.clone(), f.morphism_map().to_vec(), get_f1)?;
    let get = DoubleFunctor::new(sa.double.clone(), sb.double.clone(), f.clone(), get_mor)?;

    // Apex: objects of A; morphisms (a, u) of F/B with boundaries a and P(a, u).
    let composable = pullback_category(p, &comma.l)?;
    let (p1, p2) = (&composable.proj_left, &composable.proj_right);
    let q = &*composable.apex;
    let comp_obj = |o: usize| {
        let ((x, u), (_, w)) = (comma.object_parts[p1.on_object(o)], comma.object_parts[p2.on_object(o)]);
        comma.object_of(x, b.compose(u, w).expect("composable")).expect("comma object")
    };
    let dcomp_f0: Vec<usize> = q.objects().map(comp_obj).collect();
    let dcomp_f1 = q
        .morphisms()
        .map(|m| {
            let (g, _) = comma.morphism_parts[p1.on_morphism(m)];
            let (_, v) = comma.morphism_parts[p2.on_morphism(m)];
            comma
                .morphism_between(dcomp_f0[q.dom(m)], dcomp_f0[q.cod(m)], g, v)
                .ok_or_else(|| Error::Internal(format!("no composite for `{}`", q.mor_name(m))))
        })
        .collect::<Result<Vec<_>>>()?;
    let dcomp = FinFunctor::new(composable.apex.clone(), comma.apex.clone(), dcomp_f0, dcomp_f1)?;
    let apex = FinDoubleCategory::assemble(comma.l.clone(), p.clone(), unit, dcomp, composable)?;
    apex.validate().into_result("apex double category")?;
    let apex = Arc::new(apex);

    let left_f0 = c.objects().map(lift_of).collect();
    let left_f1 = c
        .morphisms()
        .map(|m| {
            let (g, _) = comma.morphism_parts[m];
            let sq = Square { f: lift_of(c.dom(m)), g: lift_of(c.cod(m)), u: g, v: p.on_morphism(m) };
            sa.index
                .get(&sq)
                .copied()
                .ok_or_else(|| Error::Internal(format!("square for `{}` does not commute", c.mor_name(m))))
        })
        .collect::<Result<Vec<_>>>()?;
    let left_mor = FinFunctor::new(comma.apex.clone(), sa.double.mor_cat.clone(), left_f0, left_f1)?;
    let left = DoubleFunctor::new(apex.clone(), sa.double.clone(), FinFunctor::identity(a.clone()), left_mor)?;

    let right_f0 = c.objects().map(|o| comma.object_parts[o].1).collect();
    let right_f1 = c
        .morphisms()
        .map(|m| {
            let (g, v) = comma.morphism_parts[m];
            let (u, w) = (comma.object_parts[c.dom(m)].1, comma.object_parts[c.cod(m)].1);
            sb.index[&Square { f: u, g: w, u: f.on_morphism(g), v }]
        })
        .collect();
    let right_mor = FinFunctor::new(comma.apex.clone(), sb.double.mor_cat.clone(), right_f0, right_f1)?;
    let right = DoubleFunctor::new(apex.clone(), sb.double.clone(), f.clone(), right_mor)?;

    let mut lens = InternalLens {
        source: sa.double.clone(),
        view: sb.double.clone(),
        apex: apex.clone(),
        get,
        left,
        right,
        left_candidates: 0,
    };
    lens.validate().into_result("internal lens")?;

    let candidates = double_functors_over(&apex, &sa.double, &FinFunctor::identity(a), budget)?;
    let mut matching = 0;
    for phi in &candidates {
        let phi_bar = compose_double_functors(phi, &lens.get)?;
        if is_internal_dopf(&phi_bar).is_valid() {
            matching += 1;
            if *phi != lens.left {
                return Err(Error::Internal("a second connecting double functor exists".into()));
            }
        }
    }
    lens.left_candidates = matching;
    if matching != 1 {
        return Err(Error::Internal(format!("expected one connecting double functor, found {matching}")));
    }
    Ok(lens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{codiscrete, interval_n};
    use crate::corpus::monoid;

    #[test]
    fn terminal_double_category_is_valid() {
        let t = FinDoubleCategory::terminal();
        assert!(t.validate().is_valid());
        assert_eq!(t.mor_cat().morphism_count(), 1);
    }

    #[test]
    fn squares_of_interval_two() {
        let d = squares_double_category(&interval_n(2)).unwrap();
        assert!(d.validate().is_valid());
        assert_eq!(d.mor_cat().object_count(), 6);
        assert_eq!(d.obj_cat().morphism_count(), 6);
    }

    #[test]
    fn squares_of_discrete_is_discrete() {
        let s = crate::category::discrete(&["p", "q"]).unwrap();
        let d = squares_double_category(&s).unwrap();
        assert_eq!(d.mor_cat().object_count(), 2);
        assert_eq!(d.mor_cat().morphism_count(), 2);
    }

    #[test]
    fn misassigned_composite_is_reported() {
        let d = squares_double_category(&interval_n(2)).unwrap();
        let q = &d.composable().apex;
        let mut f0 = d.dcomp().object_map().to_vec();
        let f1 = d.dcomp().morphism_map().to_vec();
        // Send the composite of the pair (id_0, 0->1) to 0->2 instead.
        let o = q.obj_id("(id_0,0->1)").unwrap();
        f0[o] = d.mor_cat().obj_id("0->2").unwrap();
        let bad = FinFunctor::new(q.clone(), d.mor_cat().clone(), f0, f1).unwrap();
        let report = d.with_dcomp(bad).unwrap().validate();
        assert!(!report.is_valid());
    }

    #[test]
    fn identity_functor_is_split_opfibration() {
        let a = Arc::new(interval_n(2));
        let id = FinFunctor::identity(a.clone());
        let table = LiftTable::from_fn(&id, |_, u| u).unwrap();
        assert!(is_split_opfibration(&id, &table).unwrap().is_valid());
    }

    #[test]
    fn malformed_lift_table_is_an_error() {
        let a = Arc::new(interval_n(1));
        let id = FinFunctor::identity(a.clone());
        let r = LiftTable::from_fn(&id, |x, _| a.ident(x));
        assert!(matches!(r, Err(StructureError::Malformed(_))));
    }

    #[test]
    fn non_split_lifts_are_rejected() {
        let a = Arc::new(monoid(&["e", "s"], |g, h| g ^ h).unwrap());
        let x = Arc::new(codiscrete(&["x", "y"]).unwrap());
        let (proj, _) = product_projection(&a, &x).unwrap();
        let e = &**proj.source();
        // At x the flip moves to y; at y it stays put.
        let table = LiftTable::from_fn(&proj, |o, u| {
            let name = e.obj_name(o);
            let target = if a.mor_name(u) == "s" { "y" } else { &name[3..4] };
            let fibre = format!("({},{})", &name[3..4], target);
            e.mor_id(&format!("({},{fibre})", a.mor_name(u))).unwrap()
        })
        .unwrap();
        let report = is_split_opfibration(&proj, &table).unwrap();
        assert!(report.has_law("split"));
        assert!(!report.has_law("opcartesian"));
    }

    #[test]
    fn identity_clens_gives_squares() {
        let a = Arc::new(interval_n(2));
        let id = FinFunctor::identity(a.clone());
        let comma = comma_category(&id).unwrap();
        let lens = clens_to_internal_lens(&id, &comma.r, &mut SearchBudget::default()).unwrap();
        assert!(lens.validate().is_valid());
        assert_eq!(lens.left_candidates, 1);
        assert_eq!(lens.apex.mor_cat().object_count(), 6);
    }

    #[test]
    fn product_projection_clens() {
        let a = Arc::new(interval_n(1));
        let x = Arc::new(codiscrete(&["x", "y"]).unwrap());
        let (proj, p) = product_projection(&a, &x).unwrap();
        let lens = clens_to_internal_lens(&proj, &p, &mut SearchBudget::default()).unwrap();
        assert!(lens.validate().is_valid());
        assert_eq!(lens.left_candidates, 1);
    }

    #[test]
    fn non_opcartesian_lifts_are_rejected() {
        // A = {1, e, z} with z absorbing and e idempotent, over {1, p}.
        let a = Arc::new(
            monoid(&["1", "e", "z"], |g, h| {
                if g == 0 {
                    h
                } else if h == 0 {
                    g
                } else {
                    g.max(h)
                }
            })
            .unwrap(),
        );
        let b = Arc::new(monoid(&["1", "p"], |g, h| g.max(h)).unwrap());
        let f =
            FinFunctor::from_named(a.clone(), b.clone(), &[("*", "*")], &[("id_*", "id_*"), ("e", "id_*"), ("z", "p")])
                .unwrap();
        let comma = comma_category(&f).unwrap();
        let mut budget = SearchBudget::default();
        let rejected = crate::enumerate::enumerate_functors(&comma.apex, &a, &mut budget)
            .unwrap()
            .into_iter()
            .filter_map(|p| match clens_to_internal_lens(&f, &p, &mut SearchBudget::default()) {
                Err(Error::Invalid { what: "split opfibration", report }) => Some(report),
                _ => None,
            })
            .find(|r| r.has_law("opcartesian") && !r.has_law("split") && !r.has_law("identity-lift"));
        let report = rejected.expect("a functor whose lifts are not opcartesian");
        assert!(report.violations()[0].witness.last().unwrap().starts_with("fills="));
    }
}
