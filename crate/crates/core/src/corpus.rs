//! Test corpora: every small category up to isomorphism, a list of named
//! fixtures, and seeded random generators.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::{codiscrete, discrete, identity_token, interval_n, terminal, FinCategory, RawCategory};
use crate::enumerate::SearchBudget;
use crate::error::Result;
use crate::functor::{pullback_category, FinFunctor};

fn object_name(i: usize) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    NAMES.get(i).map_or_else(|| format!("o{i}"), |s| s.to_string())
}

/// Builds a category from objects, non-identity arrows `(name, dom, cod)` and
/// a composition rule on non-identity arrows (indices into `arrows`, result
/// an index into `arrows` or `None` for the identity on the common object).
pub fn from_arrows(
    objects: &[&str],
    arrows: &[(&str, usize, usize)],
    compose: impl Fn(usize, usize) -> Option<usize>,
) -> Result<FinCategory> {
    let n = objects.len();
    let mut raw = RawCategory::default();
    for o in objects {
        raw.add_object(o.to_string());
    }
    for (i, o) in objects.iter().enumerate() {
        let id = raw.add_morphism(identity_token(o), i, i);
        raw.ident.push(id);
    }
    for &(name, d, c) in arrows {
        raw.add_morphism(name.to_string(), d, c);
    }
    let dom = raw.dom.clone();
    let (cat, _) = raw.finish(|g, h| match (g < n, h < n) {
        (true, _) => h,
        (_, true) => g,
        _ => compose(g - n, h - n).map_or(dom[g], |r| r + n),
    })?;
    cat.require_valid()?;
    Ok(cat)
}

/// One-object category from a monoid on `elements`, where element 0 is the
/// unit and `mul(g, h)` is the composite "g then h".
pub fn monoid(elements: &[&str], mul: impl Fn(usize, usize) -> usize) -> Result<FinCategory> {
    let arrows: Vec<(&str, usize, usize)> = elements[1..].iter().map(|&e| (e, 0, 0)).collect();
    from_arrows(&["*"], &arrows, |g, h| mul(g + 1, h + 1).checked_sub(1))
}

/// Product `a × b`, with objects and morphisms named by pair tokens.
pub fn product(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> Result<FinCategory> {
    let t = Arc::new(terminal());
    let f = FinFunctor::to_terminal(a.clone(), t.clone())?;
    let g = FinFunctor::to_terminal(b.clone(), t)?;
    Ok((*pullback_category(&f, &g)?.apex).clone())
}

/// Named structures with at most four objects and twelve morphisms.
pub fn fixtures() -> Vec<(&'static str, Arc<FinCategory>)> {
    let interval1 = Arc::new(interval_n(1));
    let z2 = Arc::new(monoid(&["e", "s"], |g, h| g ^ h).expect("Z/2"));
    let codiscrete2 = Arc::new(codiscrete(&["x", "y"]).expect("codiscrete"));
    let list: Vec<(&'static str, FinCategory)> = vec![
        ("empty", discrete::<&str>(&[]).expect("empty")),
        ("terminal", terminal()),
        ("discrete-2", discrete(&["x", "y"]).expect("discrete")),
        ("discrete-3", discrete(&["x", "y", "z"]).expect("discrete")),
        ("interval-1", interval_n(1)),
        ("interval-2", interval_n(2)),
        ("interval-3", interval_n(3)),
        ("codiscrete-2", (*codiscrete2).clone()),
        ("codiscrete-3", codiscrete(&["x", "y", "z"]).expect("codiscrete")),
        ("parallel-pair", from_arrows(&["x", "y"], &[("s", 0, 1), ("t", 0, 1)], |_, _| None).expect("pair")),
        ("z2", (*z2).clone()),
        ("z3", monoid(&["e", "r", "rr"], |g, h| (g + h) % 3).expect("Z/3")),
        ("idempotent", monoid(&["e", "p"], |g, h| g.max(h)).expect("idempotent")),
        ("span", from_arrows(&["x", "y", "z"], &[("l", 2, 0), ("r", 2, 1)], |_, _| None).expect("span")),
        ("cospan", from_arrows(&["x", "y", "z"], &[("l", 0, 2), ("r", 1, 2)], |_, _| None).expect("cospan")),
        ("square", product(&interval1, &interval1).expect("square")),
        ("z2-x-interval-1", product(&z2, &interval1).expect("product")),
        ("codiscrete-2-x-interval-1", product(&codiscrete2, &interval1).expect("product")),
    ];
    list.into_iter().map(|(n, c)| (n, Arc::new(c))).collect()
}

/// Looks up a fixture by name.
pub fn fixture(name: &str) -> Option<Arc<FinCategory>> {
    fixtures().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}

/// Object count and per-hom-set arrow counts of a category skeleton.
#[derive(Debug, Clone)]
struct Shape {
    objects: usize,
    dom: Vec<usize>,
    cod: Vec<usize>,
}

impl Shape {
    /// `homs[i * n + j]` arrows `i → j`, identities included.
    fn new(objects: usize, homs: &[usize]) -> Self {
        let (mut dom, mut cod) = ((0..objects).collect::<Vec<_>>(), (0..objects).collect::<Vec<_>>());
        for i in 0..objects {
            for j in 0..objects {
                let extra = homs[i * objects + j] - usize::from(i == j);
                for _ in 0..extra {
                    dom.push(i);
                    cod.push(j);
                }
            }
        }
        Shape { objects, dom, cod }
    }

    fn is_identity(&self, g: usize) -> bool {
        g < self.objects
    }

    fn build(&self, table: &[Option<usize>]) -> FinCategory {
        let n = self.objects;
        let m = self.dom.len();
        let mut raw = RawCategory::default();
        for i in 0..n {
            raw.add_object(object_name(i));
        }
        for i in 0..n {
            let id = raw.add_morphism(identity_token(&object_name(i)), i, i);
            raw.ident.push(id);
        }
        for g in n..m {
            raw.add_morphism(format!("f{}", g - n), self.dom[g], self.cod[g]);
        }
        raw.finish(|g, h| table[g * m + h].expect("total")).expect("distinct names").0
    }
}

/// Backtracking search for associative composition tables on one shape.
struct TableSearch<'a> {
    shape: &'a Shape,
    /// Composable pairs of non-identity arrows, with their candidate results.
    slots: Vec<(usize, usize, Vec<usize>)>,
    triples: Vec<(usize, usize, usize)>,
}

impl<'a> TableSearch<'a> {
    fn new(shape: &'a Shape) -> Self {
        let m = shape.dom.len();
        let mut slots = Vec::new();
        for g in 0..m {
            for h in 0..m {
                if shape.cod[g] == shape.dom[h] && !shape.is_identity(g) && !shape.is_identity(h) {
                    let cands =
                        (0..m).filter(|&r| shape.dom[r] == shape.dom[g] && shape.cod[r] == shape.cod[h]).collect();
                    slots.push((g, h, cands));
                }
            }
        }
        let mut triples = Vec::new();
        for g in 0..m {
            for h in 0..m {
                for k in 0..m {
                    if shape.cod[g] == shape.dom[h] && shape.cod[h] == shape.dom[k] {
                        triples.push((g, h, k));
                    }
                }
            }
        }
        TableSearch { shape, slots, triples }
    }

    fn initial_table(&self) -> Vec<Option<usize>> {
        let m = self.shape.dom.len();
        let mut table = vec![None; m * m];
        for g in 0..m {
            for h in 0..m {
                if self.shape.cod[g] == self.shape.dom[h] {
                    if self.shape.is_identity(g) {
                        table[g * m + h] = Some(h);
                    } else if self.shape.is_identity(h) {
                        table[g * m + h] = Some(g);
                    }
                }
            }
        }
        table
    }

    fn associative_so_far(&self, table: &[Option<usize>]) -> bool {
        let m = self.shape.dom.len();
        self.triples.iter().all(|&(g, h, k)| {
            let left = table[g * m + h].and_then(|gh| table[gh * m + k]);
            let right = table[h * m + k].and_then(|hk| table[g * m + hk]);
            match (left, right) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            }
        })
    }

    fn all(&self, budget: &mut SearchBudget, out: &mut Vec<Vec<Option<usize>>>) -> Result<()> {
        let mut table = self.initial_table();
        self.step(0, &mut table, budget, &mut |t| {
            out.push(t.to_vec());
            false
        })
        .map(|_| ())
    }

    fn first<R: Rng>(&mut self, rng: &mut R, budget: &mut SearchBudget) -> Result<Option<Vec<Option<usize>>>> {
        for (_, _, c) in &mut self.slots {
            c.shuffle(rng);
        }
        let mut table = self.initial_table();
        let mut found = None;
        self.step(0, &mut table, budget, &mut |t| {
            found = Some(t.to_vec());
            true
        })?;
        Ok(found)
    }

    /// Returns `true` once `emit` asks to stop.
    fn step(
        &self,
        i: usize,
        table: &mut Vec<Option<usize>>,
        budget: &mut SearchBudget,
        emit: &mut dyn FnMut(&[Option<usize>]) -> bool,
    ) -> Result<bool> {
        if i == self.slots.len() {
            return Ok(emit(table));
        }
        let m = self.shape.dom.len();
        let (g, h, ref cands) = self.slots[i];
        for &r in cands {
            budget.tick()?;
            table[g * m + h] = Some(r);
            if self.associative_so_far(table) && self.step(i + 1, table, budget, emit)? {
                return Ok(true);
            }
        }
        table[g * m + h] = None;
        Ok(false)
    }
}

/// Hom-count matrices on `n` objects with at most `max_morphisms` arrows.
fn hom_matrices(n: usize, max_morphisms: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n * n {
            out.push(cur.clone());
            return;
        }
        let min = usize::from(i / n == i % n);
        for k in min..=left {
            cur.push(k);
            go(n, i + 1, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n <= max_morphisms {
        go(n, 0, max_morphisms, &mut Vec::new(), &mut out);
    }
    out
}

/// Every category with at most `max_objects` objects and `max_morphisms`
/// morphisms, one representative per isomorphism class. Objects are named
/// `x`, `y`, ... and non-identity morphisms `f0`, `f1`, ...
pub fn small_categories(
    max_objects: usize,
    max_morphisms: usize,
    budget: &mut SearchBudget,
) -> Result<Vec<FinCategory>> {
    let mut classes: Vec<FinCategory> = Vec::new();
    for n in 0..=max_objects {
        for homs in hom_matrices(n, max_morphisms) {
            let shape = Shape::new(n, &homs);
            let mut tables = Vec::new();
            TableSearch::new(&shape).all(budget, &mut tables)?;
            for t in tables {
                let cat = shape.build(&t);
                if !classes.iter().any(|c| crate::category::is_isomorphic(c, &cat)) {
                    classes.push(cat);
                }
            }
        }
    }
    Ok(classes)
}

/// Search nodes spent on one random shape before drawing another.
const SHAPE_ATTEMPT_NODES: u64 = 20_000;

/// A random category with between one and `max_objects` objects and at most
/// `max_morphisms` morphisms. Shapes with no associative composition, or
/// none found quickly, are redrawn.
pub fn random_category<R: Rng>(
    max_objects: usize,
    max_morphisms: usize,
    rng: &mut R,
    budget: &mut SearchBudget,
) -> Result<FinCategory> {
    let max_objects = max_objects.clamp(1, max_morphisms.max(1));
    loop {
        let n = rng.gen_range(1..=max_objects);
        let mut homs = vec![0; n * n];
        for i in 0..n {
            homs[i * n + i] = 1;
        }
        let extra = rng.gen_range(0..=max_morphisms - n);
        for _ in 0..extra {
            homs[rng.gen_range(0..n * n)] += 1;
        }
        let shape = Shape::new(n, &homs);
        let mut attempt = SearchBudget::new(SHAPE_ATTEMPT_NODES);
        let found = TableSearch::new(&shape).first(rng, &mut attempt);
        budget.charge(attempt.used())?;
        if let Ok(Some(t)) = found {
            return Ok(shape.build(&t));
        }
    }
}
