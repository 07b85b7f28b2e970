//! Finite categories stored as explicit composition tables.
//!
//! Objects and morphisms are addressed by dense indices. Identifier tokens
//! are kept sorted, so index order is the canonical (lexicographic) order and
//! two categories with the same tokens and tables compare equal.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::error::{Result, StructureError};
use crate::report::ValidationReport;
use crate::Error;

/// Token for a tuple of identifiers, e.g. `(a,b)`.
pub fn tuple_token<S: AsRef<str>>(parts: &[S]) -> String {
    let mut out = String::from("(");
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(p.as_ref());
    }
    out.push(')');
    out
}

pub fn pair_token(a: &str, b: &str) -> String {
    tuple_token(&[a, b])
}

/// Token for an anchored update `(a, u)`, written `a|u`.
pub fn anchor_token(a: &str, u: &str) -> String {
    format!("{a}|{u}")
}

pub fn identity_token(a: &str) -> String {
    format!("id_{a}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<String>,
    dom: Vec<usize>,
    cod: Vec<usize>,
    ident: Vec<usize>,
    /// `comp[comp_offset[g] + out_pos[h]]` is `h∘g` when `cod g = dom h`.
    comp: Vec<usize>,
    comp_offset: Vec<usize>,
    out: Vec<Vec<usize>>,
    out_pos: Vec<usize>,
    obj_index: HashMap<String, usize>,
    mor_index: HashMap<String, usize>,
}

/// Unsorted category data produced by the constructors before canonicalisation.
#[derive(Debug, Clone, Default)]
pub(crate) struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<String>,
    pub dom: Vec<usize>,
    pub cod: Vec<usize>,
    pub ident: Vec<usize>,
}

/// Index permutations from raw (construction) order to canonical order.
#[derive(Debug, Clone)]
pub(crate) struct Canonical {
    pub obj: Vec<usize>,
    pub mor: Vec<usize>,
}

fn sort_permutation(names: &[String]) -> std::result::Result<Vec<usize>, StructureError> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&i, &j| names[i].cmp(&names[j]));
    for w in order.windows(2) {
        if names[w[0]] == names[w[1]] {
            return Err(StructureError::DuplicateId(names[w[0]].clone()));
        }
    }
    let mut perm = vec![0; names.len()];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    Ok(perm)
}

fn permute<T: Clone>(values: &[T], perm: &[usize]) -> Vec<T> {
    let mut out: Vec<Option<T>> = vec![None; values.len()];
    for (old, v) in values.iter().enumerate() {
        out[perm[old]] = Some(v.clone());
    }
    out.into_iter().map(|v| v.expect("permutation")).collect()
}

impl RawCategory {
    pub fn add_object(&mut self, name: String) -> usize {
        self.objects.push(name);
        self.objects.len() - 1
    }

    pub fn add_morphism(&mut self, name: String, dom: usize, cod: usize) -> usize {
        self.morphisms.push(name);
        self.dom.push(dom);
        self.cod.push(cod);
        self.morphisms.len() - 1
    }

    /// Sorts identifiers into canonical order and fills the composition table
    /// from `compose(g, h) = h∘g` over every raw composable pair.
    pub fn finish<F>(self, compose: F) -> std::result::Result<(FinCategory, Canonical), StructureError>
    where
        F: Fn(usize, usize) -> usize,
    {
        let obj = sort_permutation(&self.objects)?;
        let mor = sort_permutation(&self.morphisms)?;
        let mut old = vec![0; mor.len()];
        for (o, &n) in mor.iter().enumerate() {
            old[n] = o;
        }
        let dom: Vec<usize> = self.dom.iter().map(|&a| obj[a]).collect();
        let cod: Vec<usize> = self.cod.iter().map(|&a| obj[a]).collect();
        let ident: Vec<usize> = self.ident.iter().map(|&g| mor[g]).collect();
        let cat = FinCategory::assemble(
            permute(&self.objects, &obj),
            permute(&self.morphisms, &mor),
            permute(&dom, &mor),
            permute(&cod, &mor),
            permute(&ident, &obj),
            |g, h| mor[compose(old[g], old[h])],
        );
        Ok((cat, Canonical { obj, mor }))
    }
}

impl FinCategory {
    fn assemble(
        objects: Vec<String>,
        morphisms: Vec<String>,
        dom: Vec<usize>,
        cod: Vec<usize>,
        ident: Vec<usize>,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let mut out = vec![Vec::new(); objects.len()];
        let mut out_pos = vec![0; morphisms.len()];
        for (g, &d) in dom.iter().enumerate() {
            out_pos[g] = out[d].len();
            out[d].push(g);
        }
        let mut comp = Vec::new();
        let mut comp_offset = Vec::with_capacity(morphisms.len());
        for g in 0..morphisms.len() {
            comp_offset.push(comp.len());
            comp.extend(out[cod[g]].iter().map(|&h| compose(g, h)));
        }
        let obj_index = objects.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let mor_index = morphisms.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        FinCategory { objects, morphisms, dom, cod, ident, comp, comp_offset, out, out_pos, obj_index, mor_index }
    }

    /// Builds a category from named data, checking that every map is total
    /// over its declared domain and that the composition table is keyed by
    /// exactly the composable pairs. Law violations are not checked here.
    pub fn from_named<S: AsRef<str>>(
        objects: &[S],
        morphisms: &[(S, S, S)],
        identities: &[(S, S)],
        compose: &[(S, S, S)],
    ) -> std::result::Result<Self, StructureError> {
        let mut raw = RawCategory::default();
        let mut obj_ids = HashMap::new();
        for o in objects {
            let o = o.as_ref();
            if obj_ids.insert(o.to_string(), raw.objects.len()).is_some() {
                return Err(StructureError::DuplicateId(o.to_string()));
            }
            raw.add_object(o.to_string());
        }
        let lookup_obj = |id: &str, context: &str| {
            obj_ids
                .get(id)
                .copied()
                .ok_or_else(|| StructureError::Undeclared { id: id.to_string(), context: context.to_string() })
        };
        let mut mor_ids = HashMap::new();
        for (id, d, c) in morphisms {
            let id = id.as_ref();
            let context = format!("morphism `{id}`");
            let d = lookup_obj(d.as_ref(), &context)?;
            let c = lookup_obj(c.as_ref(), &context)?;
            if mor_ids.insert(id.to_string(), raw.morphisms.len()).is_some() {
                return Err(StructureError::DuplicateId(id.to_string()));
            }
            raw.add_morphism(id.to_string(), d, c);
        }
        let lookup_mor = |id: &str, context: &str| {
            mor_ids
                .get(id)
                .copied()
                .ok_or_else(|| StructureError::Undeclared { id: id.to_string(), context: context.to_string() })
        };
        let mut ident = vec![None; raw.objects.len()];
        for (o, g) in identities {
            let a = lookup_obj(o.as_ref(), "identities")?;
            let g = lookup_mor(g.as_ref(), "identities")?;
            if ident[a].replace(g).is_some() {
                return Err(StructureError::ExtraEntry { map: "identities".into(), key: o.as_ref().to_string() });
            }
        }
        raw.ident = ident
            .into_iter()
            .enumerate()
            .map(|(a, g)| {
                g.ok_or_else(|| StructureError::MissingEntry { map: "identities".into(), key: raw.objects[a].clone() })
            })
            .collect::<std::result::Result<_, _>>()?;

        let mut table: HashMap<(usize, usize), usize> = HashMap::new();
        for (g, h, r) in compose {
            let (gs, hs) = (g.as_ref(), h.as_ref());
            let key = pair_token(gs, hs);
            let g = lookup_mor(gs, "compose")?;
            let h = lookup_mor(hs, "compose")?;
            let r = lookup_mor(r.as_ref(), "compose")?;
            if raw.cod[g] != raw.dom[h] || table.insert((g, h), r).is_some() {
                return Err(StructureError::ExtraEntry { map: "compose".into(), key });
            }
        }
        let mut by_dom = vec![Vec::new(); raw.objects.len()];
        for (h, &d) in raw.dom.iter().enumerate() {
            by_dom[d].push(h);
        }
        for g in 0..raw.morphisms.len() {
            for &h in &by_dom[raw.cod[g]] {
                if !table.contains_key(&(g, h)) {
                    return Err(StructureError::MissingEntry {
                        map: "compose".into(),
                        key: pair_token(&raw.morphisms[g], &raw.morphisms[h]),
                    });
                }
            }
        }
        let (cat, _) = raw.finish(|g, h| table[&(g, h)])?;
        Ok(cat)
    }

    /// Re-labels objects and morphisms (indexed by their current position).
    /// Returns the relabelled category and the map from old to new indices.
    pub(crate) fn relabel(
        &self,
        objects: Vec<String>,
        morphisms: Vec<String>,
    ) -> std::result::Result<(FinCategory, Canonical), StructureError> {
        let raw =
            RawCategory { objects, morphisms, dom: self.dom.clone(), cod: self.cod.clone(), ident: self.ident.clone() };
        raw.finish(|g, h| self.compose(g, h).expect("composable"))
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.objects.len()
    }

    pub fn morphisms(&self) -> std::ops::Range<usize> {
        0..self.morphisms.len()
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_names(&self) -> &[String] {
        &self.morphisms
    }

    pub fn obj_name(&self, a: usize) -> &str {
        &self.objects[a]
    }

    pub fn mor_name(&self, g: usize) -> &str {
        &self.morphisms[g]
    }

    pub fn obj_id(&self, name: &str) -> Option<usize> {
        self.obj_index.get(name).copied()
    }

    pub fn mor_id(&self, name: &str) -> Option<usize> {
        self.mor_index.get(name).copied()
    }

    pub fn dom(&self, g: usize) -> usize {
        self.dom[g]
    }

    pub fn cod(&self, g: usize) -> usize {
        self.cod[g]
    }

    pub fn ident(&self, a: usize) -> usize {
        self.ident[a]
    }

    pub fn is_identity(&self, g: usize) -> bool {
        self.ident[self.dom[g]] == g
    }

    /// `h∘g`, defined when `cod g = dom h`.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        (self.cod[g] == self.dom[h]).then(|| self.comp[self.comp_offset[g] + self.out_pos[h]])
    }

    /// Morphisms with domain `a`, in canonical order.
    pub fn out(&self, a: usize) -> &[usize] {
        &self.out[a]
    }

    /// Position of `g` within `out(dom g)`.
    pub fn out_pos(&self, g: usize) -> usize {
        self.out_pos[g]
    }

    pub fn hom(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[a].iter().copied().filter(move |&g| self.cod[g] == b)
    }

    /// All `(g, h)` with `cod g = dom h`.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for g in self.morphisms() {
            for &h in &self.out[self.cod[g]] {
                pairs.push((g, h));
            }
        }
        pairs
    }

    /// All `(g, h, k)` with `cod g = dom h` and `cod h = dom k`.
    pub fn composable_triples(&self) -> Vec<(usize, usize, usize)> {
        let mut triples = Vec::new();
        for (g, h) in self.composable_pairs() {
            for &k in &self.out[self.cod[h]] {
                triples.push((g, h, k));
            }
        }
        triples
    }

    pub fn composable_pair_names(&self) -> Vec<(String, String)> {
        self.composable_pairs()
            .into_iter()
            .map(|(g, h)| (self.morphisms[g].clone(), self.morphisms[h].clone()))
            .collect()
    }

    fn assoc_witness(&self, g: usize, h: usize, k: usize) -> bool {
        let Some(hg) = self.compose(g, h) else { return true };
        let Some(kh) = self.compose(h, k) else { return true };
        match (self.compose(hg, k), self.compose(g, kh)) {
            (Some(left), Some(right)) => left == right,
            // Boundary failures are reported by the composite laws.
            _ => true,
        }
    }

    /// Checks every instance of the identity, boundary, unit and
    /// associativity laws, reporting each failure with its witness.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::new();
        let n = |g: usize| self.morphisms[g].as_str();
        for a in self.objects() {
            let i = self.ident[a];
            if self.dom[i] != a {
                report.fail("identity.dom", [self.obj_name(a), n(i)]);
            }
            if self.cod[i] != a {
                report.fail("identity.cod", [self.obj_name(a), n(i)]);
            }
        }
        let pairs = self.composable_pairs();
        for &(g, h) in &pairs {
            let r = self.compose(g, h).expect("table is total on composable pairs");
            if self.dom[r] != self.dom[g] {
                report.fail("composite.dom", [n(g), n(h), n(r)]);
            }
            if self.cod[r] != self.cod[h] {
                report.fail("composite.cod", [n(g), n(h), n(r)]);
            }
        }
        for g in self.morphisms() {
            if let Some(r) = self.compose(g, self.ident[self.cod[g]]) {
                if r != g {
                    report.fail("unit.left", [n(g), n(self.ident[self.cod[g]])]);
                }
            }
            if let Some(r) = self.compose(self.ident[self.dom[g]], g) {
                if r != g {
                    report.fail("unit.right", [n(self.ident[self.dom[g]]), n(g)]);
                }
            }
        }
        for (g, h, k) in self.composable_triples() {
            if !self.assoc_witness(g, h, k) {
                report.fail("associativity", [n(g), n(h), n(k)]);
            }
        }
        report
    }

    /// Associativity failures found among `samples` uniformly drawn
    /// composable triples. Used to cross-check the exhaustive pass.
    pub fn associativity_sample<R: Rng>(&self, samples: usize, rng: &mut R) -> Vec<(usize, usize, usize)> {
        let triples = self.composable_triples();
        if triples.is_empty() {
            return Vec::new();
        }
        let mut found: Vec<_> = (0..samples)
            .map(|_| triples[rng.gen_range(0..triples.len())])
            .filter(|&(g, h, k)| !self.assoc_witness(g, h, k))
            .collect();
        found.sort_unstable();
        found.dedup();
        found
    }

    pub fn require_valid(&self) -> Result<()> {
        self.validate().into_result("category")
    }
}

/// Category with exactly one morphism between each ordered pair of objects.
pub fn codiscrete<S: AsRef<str>>(objects: &[S]) -> std::result::Result<FinCategory, StructureError> {
    let mut raw = RawCategory::default();
    let n = objects.len();
    for o in objects {
        raw.add_object(o.as_ref().to_string());
    }
    for a in 0..n {
        for b in 0..n {
            raw.add_morphism(pair_token(objects[a].as_ref(), objects[b].as_ref()), a, b);
        }
    }
    raw.ident = (0..n).map(|a| a * n + a).collect();
    let (cat, _) = raw.finish(|g, h| (g / n) * n + h % n)?;
    Ok(cat)
}

pub fn discrete<S: AsRef<str>>(objects: &[S]) -> std::result::Result<FinCategory, StructureError> {
    let mut raw = RawCategory::default();
    for (a, o) in objects.iter().enumerate() {
        raw.add_object(o.as_ref().to_string());
        raw.add_morphism(identity_token(o.as_ref()), a, a);
    }
    raw.ident = (0..objects.len()).collect();
    let (cat, _) = raw.finish(|g, _| g)?;
    Ok(cat)
}

/// One object `*` and its identity.
pub fn terminal() -> FinCategory {
    discrete(&["*"]).expect("single object")
}

/// The total order `0 → 1 → … → n`.
pub fn interval_n(n: usize) -> FinCategory {
    let mut raw = RawCategory::default();
    for i in 0..=n {
        raw.add_object(i.to_string());
    }
    let mut index = HashMap::new();
    for i in 0..=n {
        for j in i..=n {
            let name = if i == j { identity_token(&i.to_string()) } else { format!("{i}->{j}") };
            index.insert((i, j), raw.add_morphism(name, i, j));
        }
    }
    raw.ident = (0..=n).map(|i| index[&(i, i)]).collect();
    let ends: Vec<(usize, usize)> = (0..raw.morphisms.len()).map(|g| (raw.dom[g], raw.cod[g])).collect();
    let (cat, _) = raw.finish(|g, h| index[&(ends[g].0, ends[h].1)]).expect("interval tokens are distinct");
    cat
}

/// A commutative square `g∘u = v∘f`, read as a morphism `f → g` of the
/// arrow category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Square {
    pub f: usize,
    pub g: usize,
    pub u: usize,
    pub v: usize,
}

impl Square {
    pub fn token(&self, c: &FinCategory) -> String {
        tuple_token(&[c.mor_name(self.f), c.mor_name(self.g), c.mor_name(self.u), c.mor_name(self.v)])
    }
}

/// Arrow category together with the square each of its morphisms denotes.
///
/// Objects are the morphisms of the base, under the same tokens, so the object
/// index of `ΦC` coincides with the morphism index in `C`.
#[derive(Debug, Clone)]
pub struct ArrowCategory {
    pub category: FinCategory,
    pub squares: Vec<Square>,
}

impl ArrowCategory {
    pub fn build(base: &FinCategory) -> Result<Self> {
        base.require_valid()?;
        let mut raw = RawCategory { objects: base.morphism_names().to_vec(), ..Default::default() };
        let mut squares = Vec::new();
        let mut index = HashMap::new();
        for f in base.morphisms() {
            for g in base.morphisms() {
                for u in base.hom(base.dom(f), base.dom(g)) {
                    for v in base.hom(base.cod(f), base.cod(g)) {
                        if base.compose(u, g) == base.compose(f, v) {
                            let sq = Square { f, g, u, v };
                            let id = raw.add_morphism(sq.token(base), f, g);
                            index.insert(sq, id);
                            squares.push(sq);
                        }
                    }
                }
            }
        }
        raw.ident = base
            .morphisms()
            .map(|f| {
                let sq = Square { f, g: f, u: base.ident(base.dom(f)), v: base.ident(base.cod(f)) };
                index[&sq]
            })
            .collect();
        let raw_squares = squares.clone();
        let (category, canon) = raw.finish(|s, t| {
            let (s, t) = (raw_squares[s], raw_squares[t]);
            let sq = Square {
                f: s.f,
                g: t.g,
                u: base.compose(s.u, t.u).expect("valid base"),
                v: base.compose(s.v, t.v).expect("valid base"),
            };
            index[&sq]
        })?;
        let squares = permute(&squares, &canon.mor);
        Ok(ArrowCategory { category, squares })
    }
}

/// Category whose objects are the morphisms of `base` and whose morphisms
/// are commutative squares, composed componentwise.
pub fn arrow_category(base: &FinCategory) -> Result<FinCategory> {
    Ok(ArrowCategory::build(base)?.category)
}

/// Finds an isomorphism `a ≅ b` by brute force, returning the object and
/// morphism bijections. Intended for desk-scale comparisons only.
pub fn find_isomorphism(a: &FinCategory, b: &FinCategory) -> Option<(Vec<usize>, Vec<usize>)> {
    if a.object_count() != b.object_count() || a.morphism_count() != b.morphism_count() {
        return None;
    }
    let n = a.object_count();
    let mut obj = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn objects(
        a: &FinCategory,
        b: &FinCategory,
        i: usize,
        obj: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        if i == obj.len() {
            let mut mor = vec![usize::MAX; a.morphism_count()];
            let mut taken = vec![false; b.morphism_count()];
            return morphisms(a, b, 0, obj, &mut mor, &mut taken);
        }
        for j in 0..obj.len() {
            if !used[j] {
                used[j] = true;
                obj[i] = j;
                if let Some(m) = objects(a, b, i + 1, obj, used) {
                    return Some(m);
                }
                used[j] = false;
            }
        }
        None
    }
    fn morphisms(
        a: &FinCategory,
        b: &FinCategory,
        g: usize,
        obj: &[usize],
        mor: &mut Vec<usize>,
        taken: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        if g == mor.len() {
            let ok = a
                .composable_pairs()
                .into_iter()
                .all(|(x, y)| b.compose(mor[x], mor[y]) == a.compose(x, y).map(|r| mor[r]))
                && a.objects().all(|o| mor[a.ident(o)] == b.ident(obj[o]));
            return ok.then(|| mor.clone());
        }
        let candidates: Vec<usize> = b.hom(obj[a.dom(g)], obj[a.cod(g)]).collect();
        for h in candidates {
            if !taken[h] {
                taken[h] = true;
                mor[g] = h;
                if let Some(m) = morphisms(a, b, g + 1, obj, mor, taken) {
                    return Some(m);
                }
                taken[h] = false;
            }
        }
        None
    }
    let mor = objects(a, b, 0, &mut obj, &mut used)?;
    Some((obj, mor))
}

pub fn is_isomorphic(a: &FinCategory, b: &FinCategory) -> bool {
    find_isomorphism(a, b).is_some()
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Structure(StructureError::Boundary(msg())))
    }
}

pub(crate) fn distinct<'a, I: IntoIterator<Item = &'a String>>(names: I) -> std::result::Result<(), StructureError> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(StructureError::DuplicateId(n.clone()));
        }
    }
    Ok(())
}
