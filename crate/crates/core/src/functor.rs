//! Functors between finite categories, discrete opfibrations, pullbacks and
//! comma categories.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{pair_token, require, tuple_token, ArrowCategory, FinCategory, RawCategory};
use crate::error::{Result, StructureError};
use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinFunctor {
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    f0: Vec<usize>,
    f1: Vec<usize>,
}

impl FinFunctor {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        f0: Vec<usize>,
        f1: Vec<usize>,
    ) -> std::result::Result<Self, StructureError> {
        if f0.len() != source.object_count() || f1.len() != source.morphism_count() {
            return Err(StructureError::Malformed("functor maps must be total on the source".into()));
        }
        if f0.iter().any(|&b| b >= target.object_count()) || f1.iter().any(|&v| v >= target.morphism_count()) {
            return Err(StructureError::Malformed("functor maps into undeclared target elements".into()));
        }
        Ok(FinFunctor { source, target, f0, f1 })
    }

    pub(crate) fn from_parts(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        f0: Vec<usize>,
        f1: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(f0.len(), source.object_count());
        debug_assert_eq!(f1.len(), source.morphism_count());
        FinFunctor { source, target, f0, f1 }
    }

    /// Builds a functor from named object and morphism assignments. Every
    /// source element must be assigned exactly once.
    pub fn from_named<S: AsRef<str>>(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        f0: &[(S, S)],
        f1: &[(S, S)],
    ) -> std::result::Result<Self, StructureError> {
        let obj = assign(
            "f0",
            f0,
            source.object_count(),
            |n| source.obj_id(n),
            |n| target.obj_id(n),
            |i| source.obj_name(i).to_string(),
        )?;
        let mor = assign(
            "f1",
            f1,
            source.morphism_count(),
            |n| source.mor_id(n),
            |n| target.mor_id(n),
            |i| source.mor_name(i).to_string(),
        )?;
        Ok(FinFunctor { source, target, f0: obj, f1: mor })
    }

    pub fn identity(category: Arc<FinCategory>) -> Self {
        let f0 = category.objects().collect();
        let f1 = category.morphisms().collect();
        FinFunctor { source: category.clone(), target: category, f0, f1 }
    }

    /// Unique functor into the terminal-like category `target` with one
    /// object and one morphism.
    pub fn to_terminal(source: Arc<FinCategory>, target: Arc<FinCategory>) -> Result<Self> {
        require(target.object_count() == 1 && target.morphism_count() == 1, || "target is not terminal".into())?;
        let f0 = vec![0; source.object_count()];
        let f1 = vec![0; source.morphism_count()];
        Ok(FinFunctor { source, target, f0, f1 })
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    pub fn on_object(&self, a: usize) -> usize {
        self.f0[a]
    }

    pub fn on_morphism(&self, g: usize) -> usize {
        self.f1[g]
    }

    pub fn object_map(&self) -> &[usize] {
        &self.f0
    }

    pub fn morphism_map(&self) -> &[usize] {
        &self.f1
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FinFunctor) -> Result<FinFunctor> {
        compose_functors(self, next)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_functor(self)
    }

    pub fn is_bijective(&self) -> bool {
        is_bijection(&self.f0, self.target.object_count()) && is_bijection(&self.f1, self.target.morphism_count())
    }

    pub fn is_bijective_on_objects(&self) -> bool {
        is_bijection(&self.f0, self.target.object_count())
    }
}

fn is_bijection(map: &[usize], codomain: usize) -> bool {
    if map.len() != codomain {
        return false;
    }
    let mut hit = vec![false; codomain];
    for &x in map {
        if std::mem::replace(&mut hit[x], true) {
            return false;
        }
    }
    true
}

fn assign<S: AsRef<str>>(
    map: &str,
    entries: &[(S, S)],
    size: usize,
    key: impl Fn(&str) -> Option<usize>,
    value: impl Fn(&str) -> Option<usize>,
    name: impl Fn(usize) -> String,
) -> std::result::Result<Vec<usize>, StructureError> {
    let mut out = vec![None; size];
    for (k, v) in entries {
        let (k, v) = (k.as_ref(), v.as_ref());
        let i = key(k)
            .ok_or_else(|| StructureError::Undeclared { id: k.to_string(), context: format!("keys of {map}") })?;
        let j = value(v)
            .ok_or_else(|| StructureError::Undeclared { id: v.to_string(), context: format!("values of {map}") })?;
        if out[i].replace(j).is_some() {
            return Err(StructureError::ExtraEntry { map: map.into(), key: k.to_string() });
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| StructureError::MissingEntry { map: map.into(), key: name(i) }))
        .collect()
}

/// Checks preservation of boundaries, identities and composites.
pub fn validate_functor(f: &FinFunctor) -> ValidationReport {
    let (a, b) = (&*f.source, &*f.target);
    let mut report = ValidationReport::new();
    for g in a.morphisms() {
        let v = f.f1[g];
        if f.f0[a.dom(g)] != b.dom(v) {
            report.fail("boundary.dom", [a.mor_name(g), b.mor_name(v)]);
        }
        if f.f0[a.cod(g)] != b.cod(v) {
            report.fail("boundary.cod", [a.mor_name(g), b.mor_name(v)]);
        }
    }
    for x in a.objects() {
        if f.f1[a.ident(x)] != b.ident(f.f0[x]) {
            report.fail("identity", [a.obj_name(x)]);
        }
    }
    for (g, h) in a.composable_pairs() {
        let hg = a.compose(g, h).expect("composable");
        if let Some(image) = b.compose(f.f1[g], f.f1[h]) {
            if image != f.f1[hg] {
                report.fail("composition", [a.mor_name(g), a.mor_name(h)]);
            }
        }
    }
    report
}

/// `first` followed by `second`; requires `first.target = second.source`.
pub fn compose_functors(first: &FinFunctor, second: &FinFunctor) -> Result<FinFunctor> {
    require(first.target == second.source, || "target of the first functor differs from source of the second".into())?;
    Ok(FinFunctor {
        source: first.source.clone(),
        target: second.target.clone(),
        f0: first.f0.iter().map(|&x| second.f0[x]).collect(),
        f1: first.f1.iter().map(|&g| second.f1[g]).collect(),
    })
}

pub fn identity_functor(category: &Arc<FinCategory>) -> FinFunctor {
    FinFunctor::identity(category.clone())
}

/// Source morphisms out of `a` sent to `u`.
pub fn lifts(f: &FinFunctor, a: usize, u: usize) -> impl Iterator<Item = usize> + '_ {
    f.source.out(a).iter().copied().filter(move |&g| f.f1[g] == u)
}

pub fn unique_lift(f: &FinFunctor, a: usize, u: usize) -> Option<usize> {
    let mut it = lifts(f, a, u);
    let first = it.next()?;
    it.next().is_none().then_some(first)
}

/// Unique-lift check: every `u` out of `f0 a` must have exactly one lift at
/// `a`. Witnesses are `(a, u, lifts=k)` for each failure.
pub fn is_discrete_opfibration(f: &FinFunctor) -> ValidationReport {
    let (a, b) = (&*f.source, &*f.target);
    let mut report = ValidationReport::new();
    for x in a.objects() {
        for &u in b.out(f.f0[x]) {
            let count = lifts(f, x, u).count();
            if count != 1 {
                report.fail(
                    "unique-lift",
                    [a.obj_name(x).to_string(), b.mor_name(u).to_string(), format!("lifts={count}")],
                );
            }
        }
    }
    report
}

pub fn is_identity_on_objects(f: &FinFunctor) -> bool {
    f.source.object_names() == f.target.object_names() && f.f0.iter().enumerate().all(|(i, &j)| i == j)
}

/// Pullback of a cospan `left: A → B ← C: right` with its projections.
#[derive(Debug, Clone)]
pub struct PullbackCategory {
    pub apex: Arc<FinCategory>,
    /// Projection to the source of the first functor.
    pub proj_left: FinFunctor,
    /// Projection to the source of the second functor.
    pub proj_right: FinFunctor,
    objects: HashMap<(usize, usize), usize>,
    morphisms: HashMap<(usize, usize), usize>,
}

impl PullbackCategory {
    pub fn object_of(&self, a: usize, c: usize) -> Option<usize> {
        self.objects.get(&(a, c)).copied()
    }

    pub fn morphism_of(&self, g: usize, h: usize) -> Option<usize> {
        self.morphisms.get(&(g, h)).copied()
    }

    /// Mediating functor `⟨h, k⟩` for a commuting cone `h: X → A`, `k: X → C`.
    pub fn pairing(&self, h: &FinFunctor, k: &FinFunctor) -> std::result::Result<FinFunctor, StructureError> {
        if h.source != k.source || h.target != self.proj_left.target || k.target != self.proj_right.target {
            return Err(StructureError::Boundary("cone legs do not match the pullback".into()));
        }
        let x = &h.source;
        let f0 = x
            .objects()
            .map(|o| {
                self.object_of(h.f0[o], k.f0[o]).ok_or_else(|| {
                    StructureError::Malformed(format!("cone does not commute at object `{}`", x.obj_name(o)))
                })
            })
            .collect::<std::result::Result<_, _>>()?;
        let f1 = x
            .morphisms()
            .map(|g| {
                self.morphism_of(h.f1[g], k.f1[g]).ok_or_else(|| {
                    StructureError::Malformed(format!("cone does not commute at morphism `{}`", x.mor_name(g)))
                })
            })
            .collect::<std::result::Result<_, _>>()?;
        Ok(FinFunctor::from_parts(x.clone(), self.apex.clone(), f0, f1))
    }
}

/// Pullback of `f: A → B` and `g: C → B`, computed componentwise. Objects and
/// morphisms are named by the pair token of their components.
pub fn pullback_category(f: &FinFunctor, g: &FinFunctor) -> Result<PullbackCategory> {
    require(f.target == g.target, || "cospan legs have different targets".into())?;
    let (a, c) = (&*f.source, &*g.source);
    let mut raw = RawCategory::default();
    let mut obj_pairs = Vec::new();
    let mut obj_raw = HashMap::new();
    for x in a.objects() {
        for y in c.objects() {
            if f.f0[x] == g.f0[y] {
                let id = raw.add_object(pair_token(a.obj_name(x), c.obj_name(y)));
                obj_raw.insert((x, y), id);
                obj_pairs.push((x, y));
            }
        }
    }
    let mut mor_pairs = Vec::new();
    let mut mor_raw = HashMap::new();
    for p in a.morphisms() {
        for q in c.morphisms() {
            if f.f1[p] == g.f1[q] {
                let d = obj_raw.get(&(a.dom(p), c.dom(q)));
                let e = obj_raw.get(&(a.cod(p), c.cod(q)));
                let (Some(&d), Some(&e)) = (d, e) else {
                    // Only reachable when a leg breaks the boundary law.
                    let mut report = validate_functor(f).scoped("left");
                    report.extend(validate_functor(g).scoped("right"));
                    return Err(crate::Error::Invalid { what: "functor", report });
                };
                let id = raw.add_morphism(pair_token(a.mor_name(p), c.mor_name(q)), d, e);
                mor_raw.insert((p, q), id);
                mor_pairs.push((p, q));
            }
        }
    }
    raw.ident = obj_pairs.iter().map(|&(x, y)| mor_raw[&(a.ident(x), c.ident(y))]).collect();
    let (apex, canon) = raw.finish(|s, t| {
        let (p, q) = mor_pairs[s];
        let (p2, q2) = mor_pairs[t];
        mor_raw[&(a.compose(p, p2).expect("composable"), c.compose(q, q2).expect("composable"))]
    })?;
    let apex = Arc::new(apex);
    let mut left0 = vec![0; obj_pairs.len()];
    let mut right0 = vec![0; obj_pairs.len()];
    let mut objects = HashMap::new();
    for (raw_id, &(x, y)) in obj_pairs.iter().enumerate() {
        let id = canon.obj[raw_id];
        left0[id] = x;
        right0[id] = y;
        objects.insert((x, y), id);
    }
    let mut left1 = vec![0; mor_pairs.len()];
    let mut right1 = vec![0; mor_pairs.len()];
    let mut morphisms = HashMap::new();
    for (raw_id, &(p, q)) in mor_pairs.iter().enumerate() {
        let id = canon.mor[raw_id];
        left1[id] = p;
        right1[id] = q;
        morphisms.insert((p, q), id);
    }
    Ok(PullbackCategory {
        proj_left: FinFunctor::from_parts(apex.clone(), f.source.clone(), left0, left1),
        proj_right: FinFunctor::from_parts(apex.clone(), g.source.clone(), right0, right1),
        apex,
        objects,
        morphisms,
    })
}

/// Domain and codomain functors `l, r: ΦB → B` of an arrow category.
pub fn arrow_legs(arrow: &ArrowCategory, base: &Arc<FinCategory>) -> (FinFunctor, FinFunctor) {
    let cat = Arc::new(arrow.category.clone());
    let l0 = cat.objects().map(|f| base.dom(f)).collect();
    let r0 = cat.objects().map(|f| base.cod(f)).collect();
    let l1 = arrow.squares.iter().map(|s| s.u).collect();
    let r1 = arrow.squares.iter().map(|s| s.v).collect();
    (FinFunctor::from_parts(cat.clone(), base.clone(), l0, l1), FinFunctor::from_parts(cat, base.clone(), r0, r1))
}

/// Comma category `f/B` with its projections `l: f/B → A`, `r: f/B → B`.
#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub apex: Arc<FinCategory>,
    pub l: FinFunctor,
    pub r: FinFunctor,
    /// For each object, the pair `(a, u: f0 a → b)`.
    pub object_parts: Vec<(usize, usize)>,
    /// For each morphism `(a,u) → (a',u')`, the pair `(g, v)`.
    pub morphism_parts: Vec<(usize, usize)>,
    objects: HashMap<(usize, usize), usize>,
}

impl CommaCategory {
    pub fn object_of(&self, a: usize, u: usize) -> Option<usize> {
        self.objects.get(&(a, u)).copied()
    }

    /// The morphism `(g, v): (a, u) → (a', u')` if it exists.
    pub fn morphism_between(&self, source: usize, target: usize, g: usize, v: usize) -> Option<usize> {
        self.apex.hom(source, target).find(|&m| self.morphism_parts[m] == (g, v))
    }
}

/// Objects `(a, u: f0 a → b)`; morphisms `(g, v): (a,u) → (a',u')` with
/// `u'∘f1(g) = v∘u`. Objects are named `(a,u)` and morphisms `(g,u,u',v)`.
pub fn comma_category(f: &FinFunctor) -> Result<CommaCategory> {
    f.source.require_valid()?;
    f.target.require_valid()?;
    f.validate().into_result("functor")?;
    let (a, b) = (&*f.source, &*f.target);
    let mut raw = RawCategory::default();
    let mut obj_parts = Vec::new();
    let mut obj_raw = HashMap::new();
    for x in a.objects() {
        for &u in b.out(f.f0[x]) {
            let id = raw.add_object(pair_token(a.obj_name(x), b.mor_name(u)));
            obj_raw.insert((x, u), id);
            obj_parts.push((x, u));
        }
    }
    let mut mor_parts = Vec::new();
    let mut mor_raw = HashMap::new();
    for (s, &(x, u)) in obj_parts.iter().enumerate() {
        for (t, &(y, w)) in obj_parts.iter().enumerate() {
            for g in a.hom(x, y) {
                for v in b.hom(b.cod(u), b.cod(w)) {
                    if b.compose(f.f1[g], w) == b.compose(u, v) {
                        let name = tuple_token(&[a.mor_name(g), b.mor_name(u), b.mor_name(w), b.mor_name(v)]);
                        let id = raw.add_morphism(name, s, t);
                        mor_raw.insert((s, t, g, v), id);
                        mor_parts.push((s, t, g, v));
                    }
                }
            }
        }
    }
    raw.ident =
        obj_parts.iter().enumerate().map(|(s, &(x, u))| mor_raw[&(s, s, a.ident(x), b.ident(b.cod(u)))]).collect();
    let (apex, canon) = raw.finish(|p, q| {
        let (s, _, g, v) = mor_parts[p];
        let (_, t, g2, v2) = mor_parts[q];
        mor_raw[&(s, t, a.compose(g, g2).expect("composable"), b.compose(v, v2).expect("composable"))]
    })?;
    let apex = Arc::new(apex);
    let mut object_parts = vec![(0, 0); obj_parts.len()];
    let mut objects = HashMap::new();
    for (raw_id, &part) in obj_parts.iter().enumerate() {
        object_parts[canon.obj[raw_id]] = part;
        objects.insert(part, canon.obj[raw_id]);
    }
    let mut morphism_parts = vec![(0, 0); mor_parts.len()];
    for (raw_id, &(_, _, g, v)) in mor_parts.iter().enumerate() {
        morphism_parts[canon.mor[raw_id]] = (g, v);
    }
    let l = FinFunctor::from_parts(
        apex.clone(),
        f.source.clone(),
        object_parts.iter().map(|&(x, _)| x).collect(),
        morphism_parts.iter().map(|&(g, _)| g).collect(),
    );
    let r = FinFunctor::from_parts(
        apex.clone(),
        f.target.clone(),
        object_parts.iter().map(|&(_, u)| b.cod(u)).collect(),
        morphism_parts.iter().map(|&(_, v)| v).collect(),
    );
    Ok(CommaCategory { apex, l, r, object_parts, morphism_parts, objects })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{codiscrete, discrete, interval_n, terminal, FinCategory};

    fn arc(c: FinCategory) -> Arc<FinCategory> {
        Arc::new(c)
    }

    #[test]
    fn identity_and_terminal_functors_are_valid() {
        let c2 = arc(codiscrete(&["x", "y"]).unwrap());
        assert!(FinFunctor::identity(c2.clone()).validate().is_valid());
        let f = FinFunctor::to_terminal(arc(interval_n(1)), arc(terminal())).unwrap();
        assert!(f.validate().is_valid());
    }

    #[test]
    fn swapped_morphism_breaks_boundaries() {
        let c2 = arc(codiscrete(&["x", "y"]).unwrap());
        let consts = [("x", "x"), ("y", "x")];
        let forced = [("(x,x)", "(x,x)"), ("(x,y)", "(x,x)"), ("(y,x)", "(x,x)"), ("(y,y)", "(x,x)")];
        let f = FinFunctor::from_named(c2.clone(), c2.clone(), &consts, &forced).unwrap();
        assert!(f.validate().is_valid());
        let swapped = [("(x,x)", "(x,x)"), ("(x,y)", "(y,x)"), ("(y,x)", "(x,x)"), ("(y,y)", "(x,x)")];
        let g = FinFunctor::from_named(c2.clone(), c2, &consts, &swapped).unwrap();
        let report = g.validate();
        assert!(report.has_law("boundary.dom"));
        assert!(report.violations().iter().any(|v| v.witness[0] == "(x,y)"));
    }

    #[test]
    fn composition_is_unital() {
        let i = arc(interval_n(2));
        let t = arc(terminal());
        let f = FinFunctor::to_terminal(i.clone(), t.clone()).unwrap();
        assert_eq!(compose_functors(&FinFunctor::identity(i), &f).unwrap(), f);
        assert_eq!(compose_functors(&f, &FinFunctor::identity(t)).unwrap(), f);
    }

    #[test]
    fn dopf_examples() {
        let c2 = arc(codiscrete(&["x", "y"]).unwrap());
        assert!(is_discrete_opfibration(&FinFunctor::identity(c2.clone())).is_valid());
        let bang = FinFunctor::to_terminal(c2, arc(terminal())).unwrap();
        let report = is_discrete_opfibration(&bang);
        assert_eq!(report.violations().len(), 2);
        assert!(report.violations().iter().all(|v| v.witness[2] == "lifts=2"));
    }

    #[test]
    fn identity_on_objects() {
        let d = arc(discrete(&["x", "y"]).unwrap());
        let c = arc(codiscrete(&["x", "y"]).unwrap());
        assert!(is_identity_on_objects(&FinFunctor::identity(c.clone())));
        let incl = FinFunctor::from_named(
            d.clone(),
            c.clone(),
            &[("x", "x"), ("y", "y")],
            &[("id_x", "(x,x)"), ("id_y", "(y,y)")],
        )
        .unwrap();
        assert!(incl.validate().is_valid());
        assert!(is_identity_on_objects(&incl));
        let bang = FinFunctor::to_terminal(c, arc(terminal())).unwrap();
        assert!(!is_identity_on_objects(&bang));
    }

    #[test]
    fn pullback_over_terminal_is_product() {
        let c2 = arc(codiscrete(&["x", "y"]).unwrap());
        let t = arc(terminal());
        let f = FinFunctor::to_terminal(c2.clone(), t.clone()).unwrap();
        let pb = pullback_category(&f, &f).unwrap();
        assert_eq!((pb.apex.object_count(), pb.apex.morphism_count()), (4, 16));
        assert!(pb.apex.validate().is_valid());
        assert!(pb.proj_left.validate().is_valid());
        assert!(pb.proj_right.validate().is_valid());
    }

    #[test]
    fn pullback_of_disjoint_inclusions_is_empty() {
        let one = arc(discrete(&["p"]).unwrap());
        let two = arc(discrete(&["x", "y"]).unwrap());
        let ix = FinFunctor::from_named(one.clone(), two.clone(), &[("p", "x")], &[("id_p", "id_x")]).unwrap();
        let iy = FinFunctor::from_named(one, two, &[("p", "y")], &[("id_p", "id_y")]).unwrap();
        let pb = pullback_category(&ix, &iy).unwrap();
        assert_eq!(pb.apex.object_count(), 0);
        assert_eq!(pb.apex.morphism_count(), 0);
    }

    #[test]
    fn comma_examples() {
        let i = arc(interval_n(1));
        let one = arc(discrete(&["p"]).unwrap());
        let at0 = FinFunctor::from_named(one, i.clone(), &[("p", "0")], &[("id_p", "id_0")]).unwrap();
        let coslice = comma_category(&at0).unwrap();
        assert_eq!(coslice.apex.object_count(), 2);
        assert_eq!(coslice.apex.morphism_count(), 3);
        assert!(coslice.apex.validate().is_valid());

        let empty = arc(discrete::<&str>(&[]).unwrap());
        let from_empty = FinFunctor::new(empty, i.clone(), vec![], vec![]).unwrap();
        assert_eq!(comma_category(&from_empty).unwrap().apex.object_count(), 0);

        let id = FinFunctor::identity(i.clone());
        let comma = comma_category(&id).unwrap();
        let arrow = crate::category::arrow_category(&i).unwrap();
        assert!(crate::category::is_isomorphic(&comma.apex, &arrow));
    }
}
