//! Exhaustive enumeration of functors, cofunctors, discrete opfibrations and
//! lenses between finite categories.
//!
//! Every search is a backtracking pass that only prunes candidates the laws
//! already rule out, so the results are complete. Results come out in
//! lexicographic order of their index tables, which is the canonical order
//! on identifier tokens.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::category::FinCategory;
use crate::cofunctor::{Anchors, FinCofunctor};
use crate::error::{Error, Result};
use crate::functor::{is_discrete_opfibration, FinFunctor};
use crate::lens::FinLens;

pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;

/// Caps the number of candidate assignments a search may try.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    limit: u64,
    used: u64,
}

impl SearchBudget {
    pub fn new(limit: u64) -> Self {
        SearchBudget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Records `nodes` spent by a nested search.
    pub(crate) fn charge(&mut self, nodes: u64) -> Result<()> {
        self.used += nodes;
        if self.used > self.limit {
            return Err(Error::GuardExceeded { limit: self.limit });
        }
        Ok(())
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            Err(Error::GuardExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::new(DEFAULT_MAX_CANDIDATES)
    }
}

/// Composable pairs `(g, h, h∘g)` grouped by the largest index among the
/// three, so each can be checked as soon as all three are assigned.
pub(crate) fn pairs_by_last(c: &FinCategory) -> Vec<Vec<(usize, usize, usize)>> {
    let mut by_last = vec![Vec::new(); c.morphism_count()];
    for (g, h) in c.composable_pairs() {
        let r = c.compose(g, h).expect("composable");
        by_last[g.max(h).max(r)].push((g, h, r));
    }
    by_last
}

/// All object maps `n → m`, in lexicographic order.
fn object_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    if n > 0 && m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    loop {
        out.push(cur.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < m {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Every functor `a → b`.
pub fn enumerate_functors(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    budget: &mut SearchBudget,
) -> Result<Vec<FinFunctor>> {
    let checks = pairs_by_last(a);
    let mut out = Vec::new();
    for f0 in object_maps(a.object_count(), b.object_count()) {
        let mut f1 = vec![usize::MAX; a.morphism_count()];
        functor_search(a, b, &f0, &checks, 0, &mut f1, budget, &mut |f1| {
            out.push(FinFunctor::from_parts(a.clone(), b.clone(), f0.clone(), f1.to_vec()));
        })?;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn functor_search(
    a: &FinCategory,
    b: &FinCategory,
    f0: &[usize],
    checks: &[Vec<(usize, usize, usize)>],
    g: usize,
    f1: &mut Vec<usize>,
    budget: &mut SearchBudget,
    emit: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    if g == f1.len() {
        emit(f1);
        return Ok(());
    }
    let (x, y) = (f0[a.dom(g)], f0[a.cod(g)]);
    let forced = a.is_identity(g).then(|| b.ident(x));
    for v in b.hom(x, y) {
        if forced.is_some_and(|i| i != v) {
            continue;
        }
        budget.tick()?;
        f1[g] = v;
        let ok = checks[g].iter().all(|&(p, q, r)| b.compose(f1[p], f1[q]) == Some(f1[r]));
        if ok {
            functor_search(a, b, f0, checks, g + 1, f1, budget, emit)?;
        }
    }
    f1[g] = usize::MAX;
    Ok(())
}

/// Shared backtracking over lift assignments for a fixed object map.
struct LiftSearch<'a> {
    target: &'a FinCategory,
    source: &'a FinCategory,
    anchors: Anchors,
    candidates: Vec<Vec<usize>>,
}

impl<'a> LiftSearch<'a> {
    fn new(
        target: &'a FinCategory,
        source: &'a FinCategory,
        phi0: &'a [usize],
        admissible: impl Fn(usize, usize, usize) -> bool,
    ) -> Self {
        let anchors = Anchors::new(target, source, phi0);
        let candidates = anchors
            .pairs()
            .iter()
            .map(|&(x, u)| {
                if u == source.ident(phi0[x]) {
                    // Identities lift to identities.
                    return vec![target.ident(x)];
                }
                target
                    .out(x)
                    .iter()
                    .copied()
                    .filter(|&g| phi0[target.cod(g)] == source.cod(u) && admissible(x, u, g))
                    .collect()
            })
            .collect();
        LiftSearch { target, source, anchors, candidates }
    }

    /// Composition-law instances whose three anchors are all assigned and
    /// that involve anchor `i`.
    fn consistent(&self, i: usize, phi1: &[usize]) -> bool {
        let (a, b) = (self.target, self.source);
        for x_idx in 0..=i {
            let (x, u) = self.anchors.get(x_idx);
            let moved = a.cod(phi1[x_idx]);
            for &v in b.out(b.cod(u)) {
                let j = self.anchors.index(b, moved, v);
                let k = self.anchors.index(b, x, b.compose(u, v).expect("composable"));
                if j > i || k > i || (x_idx != i && j != i && k != i) {
                    continue;
                }
                if a.compose(phi1[x_idx], phi1[j]) != Some(phi1[k]) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&self, budget: &mut SearchBudget, emit: &mut dyn FnMut(&[usize])) -> Result<()> {
        let mut phi1 = vec![usize::MAX; self.anchors.len()];
        self.step(0, &mut phi1, budget, emit)
    }

    fn step(
        &self,
        i: usize,
        phi1: &mut Vec<usize>,
        budget: &mut SearchBudget,
        emit: &mut dyn FnMut(&[usize]),
    ) -> Result<()> {
        if i == phi1.len() {
            emit(phi1);
            return Ok(());
        }
        for &g in &self.candidates[i] {
            budget.tick()?;
            phi1[i] = g;
            if self.consistent(i, phi1) {
                self.step(i + 1, phi1, budget, emit)?;
            }
        }
        phi1[i] = usize::MAX;
        Ok(())
    }
}

/// Every cofunctor `source ⇸ target` with object map `phi0`.
pub fn enumerate_cofunctors_over(
    target: &Arc<FinCategory>,
    source: &Arc<FinCategory>,
    phi0: &[usize],
    budget: &mut SearchBudget,
) -> Result<Vec<FinCofunctor>> {
    let search = LiftSearch::new(target, source, phi0, |_, _, _| true);
    let mut out = Vec::new();
    search.run(budget, &mut |phi1| {
        out.push(
            FinCofunctor::with_inferred_p0(target.clone(), source.clone(), phi0.to_vec(), phi1.to_vec())
                .expect("well-formed"),
        )
    })?;
    Ok(out)
}

/// Every cofunctor `source ⇸ target`.
pub fn enumerate_cofunctors(
    target: &Arc<FinCategory>,
    source: &Arc<FinCategory>,
    budget: &mut SearchBudget,
) -> Result<Vec<FinCofunctor>> {
    let mut out = Vec::new();
    for phi0 in object_maps(target.object_count(), source.object_count()) {
        out.extend(enumerate_cofunctors_over(target, source, &phi0, budget)?);
    }
    Ok(out)
}

/// Every lens `a ⇌ b`. Get functors are enumerated first; for each, lifts
/// are restricted to morphisms over the update (Put-Get) before the
/// composition law is searched.
pub fn enumerate_lenses(a: &Arc<FinCategory>, b: &Arc<FinCategory>, budget: &mut SearchBudget) -> Result<Vec<FinLens>> {
    let mut out = Vec::new();
    for get in enumerate_functors(a, b, budget)? {
        let f1 = get.morphism_map();
        let search = LiftSearch::new(a, b, get.object_map(), |_, u, g| f1[g] == u);
        if search.candidates.iter().any(Vec::is_empty) {
            continue;
        }
        let mut puts = Vec::new();
        search.run(budget, &mut |phi1| puts.push(phi1.to_vec()))?;
        for phi1 in puts {
            let put = FinCofunctor::with_inferred_p0(a.clone(), b.clone(), get.object_map().to_vec(), phi1)
                .expect("well-formed");
            out.push(FinLens::new(get.clone(), put).expect("matching boundaries"));
        }
    }
    Ok(out)
}

/// Every discrete opfibration `a → b`.
pub fn enumerate_dopfs(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    budget: &mut SearchBudget,
) -> Result<Vec<FinFunctor>> {
    Ok(enumerate_functors(a, b, budget)?.into_iter().filter(|f| is_discrete_opfibration(f).is_valid()).collect())
}

/// Every pair `(get, put)` where `get` is a functor and `put` assigns each
/// anchored update some morphism out of its anchor, with `p₀ = cod∘φ₁`. No
/// law beyond the boundary is imposed on `put`.
pub fn enumerate_lens_candidates(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    budget: &mut SearchBudget,
) -> Result<Vec<FinLens>> {
    let mut out = Vec::new();
    for get in enumerate_functors(a, b, budget)? {
        let anchors = Anchors::new(a, b, get.object_map());
        let choices: Vec<&[usize]> = anchors.pairs().iter().map(|&(x, _)| a.out(x)).collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut idx = vec![0; choices.len()];
        'odometer: loop {
            budget.tick()?;
            let phi1 = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            let put = FinCofunctor::with_inferred_p0(a.clone(), b.clone(), get.object_map().to_vec(), phi1)
                .expect("well-formed");
            out.push(FinLens::new(get.clone(), put).expect("matching boundaries"));
            for k in (0..idx.len()).rev() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    continue 'odometer;
                }
                idx[k] = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// A randomly chosen functor `a → b`, found by a search that visits object
/// maps and candidates in shuffled order. `None` when no functor exists.
pub fn random_functor<R: Rng>(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    rng: &mut R,
    budget: &mut SearchBudget,
) -> Result<Option<FinFunctor>> {
    let checks = pairs_by_last(a);
    let mut maps = object_maps(a.object_count(), b.object_count());
    maps.shuffle(rng);
    for f0 in maps {
        let mut f1 = vec![usize::MAX; a.morphism_count()];
        if random_functor_step(a, b, &f0, &checks, 0, &mut f1, rng, budget)? {
            return Ok(Some(FinFunctor::from_parts(a.clone(), b.clone(), f0, f1)));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn random_functor_step<R: Rng>(
    a: &FinCategory,
    b: &FinCategory,
    f0: &[usize],
    checks: &[Vec<(usize, usize, usize)>],
    g: usize,
    f1: &mut Vec<usize>,
    rng: &mut R,
    budget: &mut SearchBudget,
) -> Result<bool> {
    if g == f1.len() {
        return Ok(true);
    }
    let (x, y) = (f0[a.dom(g)], f0[a.cod(g)]);
    let mut candidates: Vec<usize> = if a.is_identity(g) { vec![b.ident(x)] } else { b.hom(x, y).collect() };
    candidates.shuffle(rng);
    for v in candidates {
        budget.tick()?;
        f1[g] = v;
        if checks[g].iter().all(|&(p, q, r)| b.compose(f1[p], f1[q]) == Some(f1[r]))
            && random_functor_step(a, b, f0, checks, g + 1, f1, rng, budget)?
        {
            return Ok(true);
        }
    }
    f1[g] = usize::MAX;
    Ok(false)
}

impl LiftSearch<'_> {
    fn first<R: Rng>(&mut self, rng: &mut R, budget: &mut SearchBudget) -> Result<Option<Vec<usize>>> {
        for c in &mut self.candidates {
            c.shuffle(rng);
        }
        let mut phi1 = vec![usize::MAX; self.anchors.len()];
        Ok(self.first_step(0, &mut phi1, budget)?.then_some(phi1))
    }

    fn first_step(&self, i: usize, phi1: &mut Vec<usize>, budget: &mut SearchBudget) -> Result<bool> {
        if i == phi1.len() {
            return Ok(true);
        }
        for &g in &self.candidates[i] {
            budget.tick()?;
            phi1[i] = g;
            if self.consistent(i, phi1) && self.first_step(i + 1, phi1, budget)? {
                return Ok(true);
            }
        }
        phi1[i] = usize::MAX;
        Ok(false)
    }
}

/// A randomly chosen cofunctor `source ⇸ target`, or `None` if none exists.
pub fn random_cofunctor<R: Rng>(
    target: &Arc<FinCategory>,
    source: &Arc<FinCategory>,
    rng: &mut R,
    budget: &mut SearchBudget,
) -> Result<Option<FinCofunctor>> {
    let mut maps = object_maps(target.object_count(), source.object_count());
    maps.shuffle(rng);
    for phi0 in maps {
        let mut search = LiftSearch::new(target, source, &phi0, |_, _, _| true);
        if let Some(phi1) = search.first(rng, budget)? {
            return Ok(Some(
                FinCofunctor::with_inferred_p0(target.clone(), source.clone(), phi0, phi1).expect("well-formed"),
            ));
        }
    }
    Ok(None)
}

/// A randomly chosen lens `a ⇌ b` over a randomly chosen get functor.
pub fn random_lens<R: Rng>(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    rng: &mut R,
    budget: &mut SearchBudget,
) -> Result<Option<FinLens>> {
    // A few independent get draws; most functors admit no put at all.
    for _ in 0..16 {
        let Some(get) = random_functor(a, b, rng, budget)? else { return Ok(None) };
        let f1 = get.morphism_map().to_vec();
        let mut search = LiftSearch::new(a, b, get.object_map(), |_, u, g| f1[g] == u);
        if search.candidates.iter().any(Vec::is_empty) {
            continue;
        }
        if let Some(phi1) = search.first(rng, budget)? {
            let put = FinCofunctor::with_inferred_p0(a.clone(), b.clone(), get.object_map().to_vec(), phi1)
                .expect("well-formed");
            return Ok(Some(FinLens::new(get, put).expect("matching boundaries")));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{codiscrete, interval_n, terminal};

    fn arc(c: FinCategory) -> Arc<FinCategory> {
        Arc::new(c)
    }

    #[test]
    fn object_maps_enumerate_all() {
        assert_eq!(object_maps(2, 3).len(), 9);
        assert_eq!(object_maps(0, 0).len(), 1);
        assert_eq!(object_maps(1, 0).len(), 0);
    }

    #[test]
    fn lens_counts() {
        let c1 = arc(codiscrete(&["0"]).unwrap());
        let c2 = arc(codiscrete(&["0", "1"]).unwrap());
        let c3 = arc(codiscrete(&["0", "1", "2"]).unwrap());
        let mut budget = SearchBudget::default();
        assert_eq!(enumerate_lenses(&c2, &c1, &mut budget).unwrap().len(), 1);
        assert_eq!(enumerate_lenses(&c2, &c2, &mut budget).unwrap().len(), 2);
        assert_eq!(enumerate_lenses(&c3, &c3, &mut budget).unwrap().len(), 6);
        let i = arc(interval_n(1));
        assert_eq!(enumerate_lenses(&i, &arc(terminal()), &mut budget).unwrap().len(), 1);
    }

    #[test]
    fn no_dopf_from_interval_to_terminal() {
        let i = arc(interval_n(1));
        let mut budget = SearchBudget::default();
        assert!(enumerate_dopfs(&i, &arc(terminal()), &mut budget).unwrap().is_empty());
    }

    #[test]
    fn guard_trips() {
        let c3 = arc(codiscrete(&["0", "1", "2"]).unwrap());
        let mut budget = SearchBudget::new(10);
        assert_eq!(enumerate_lenses(&c3, &c3, &mut budget).unwrap_err(), Error::GuardExceeded { limit: 10 });
    }

    #[test]
    fn candidates_cover_all_lift_assignments() {
        let c2 = arc(codiscrete(&["0", "1"]).unwrap());
        let c1 = arc(codiscrete(&["0"]).unwrap());
        let mut budget = SearchBudget::default();
        // One functor; two anchors, each with two morphisms out of its anchor.
        assert_eq!(enumerate_lens_candidates(&c2, &c1, &mut budget).unwrap().len(), 4);
    }
}
