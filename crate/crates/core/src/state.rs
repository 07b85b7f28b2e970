//! Set-based lenses with a Get function and a Put function, and their
//! embedding as lenses between codiscrete categories.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{anchor_token, codiscrete, distinct, require};
use crate::cofunctor::{Anchors, FinCofunctor};
use crate::error::{Result, StructureError};
use crate::functor::FinFunctor;
use crate::lens::FinLens;
use crate::report::ValidationReport;

/// Get `A → B` and Put `A × B → A` over finite sets. Elements are kept in
/// sorted order; `put[a * |B| + b]` is `put(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateLens {
    source: Vec<String>,
    view: Vec<String>,
    get: Vec<usize>,
    put: Vec<usize>,
}

fn sorted_index<S: AsRef<str>>(
    items: &[S],
) -> std::result::Result<(Vec<String>, HashMap<String, usize>), StructureError> {
    let mut names: Vec<String> = items.iter().map(|s| s.as_ref().to_string()).collect();
    distinct(&names)?;
    names.sort();
    let index = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
    Ok((names, index))
}

impl StateLens {
    pub fn new<S: AsRef<str>>(
        source: &[S],
        view: &[S],
        get: impl Fn(&str) -> String,
        put: impl Fn(&str, &str) -> String,
    ) -> std::result::Result<Self, StructureError> {
        let (source, si) = sorted_index(source)?;
        let (view, vi) = sorted_index(view)?;
        let look = |m: &HashMap<String, usize>, n: String, ctx: &str| {
            m.get(&n).copied().ok_or(StructureError::Undeclared { id: n, context: ctx.into() })
        };
        let get = source.iter().map(|a| look(&vi, get(a), "values of get")).collect::<std::result::Result<_, _>>()?;
        let mut table = Vec::with_capacity(source.len() * view.len());
        for a in &source {
            for b in &view {
                table.push(look(&si, put(a, b), "values of put")?);
            }
        }
        Ok(StateLens { source, view, get, put: table })
    }

    /// Builds from explicit tables; `put` is keyed by `a|b` tokens.
    pub fn from_named<S: AsRef<str>>(
        source: &[S],
        view: &[S],
        get: &[(S, S)],
        put: &[(S, S)],
    ) -> std::result::Result<Self, StructureError> {
        let (src, _) = sorted_index(source)?;
        let (vw, _) = sorted_index(view)?;
        let mut get_map = HashMap::new();
        for (a, b) in get {
            if get_map.insert(a.as_ref().to_string(), b.as_ref().to_string()).is_some() {
                return Err(StructureError::ExtraEntry { map: "get".into(), key: a.as_ref().into() });
            }
        }
        let mut put_map = HashMap::new();
        for (k, a) in put {
            if put_map.insert(k.as_ref().to_string(), a.as_ref().to_string()).is_some() {
                return Err(StructureError::ExtraEntry { map: "put".into(), key: k.as_ref().into() });
            }
        }
        for k in get_map.keys() {
            if !src.contains(k) {
                return Err(StructureError::ExtraEntry { map: "get".into(), key: k.clone() });
            }
        }
        for k in put_map.keys() {
            if !src.iter().any(|a| vw.iter().any(|b| &anchor_token(a, b) == k)) {
                return Err(StructureError::ExtraEntry { map: "put".into(), key: k.clone() });
            }
        }
        let missing = std::cell::RefCell::new(None);
        let lens = StateLens::new(
            source,
            view,
            |a| {
                get_map.get(a).cloned().unwrap_or_else(|| {
                    missing
                        .borrow_mut()
                        .get_or_insert(StructureError::MissingEntry { map: "get".into(), key: a.into() });
                    vw.first().cloned().unwrap_or_default()
                })
            },
            |a, b| {
                let key = anchor_token(a, b);
                put_map.get(&key).cloned().unwrap_or_else(|| {
                    missing.borrow_mut().get_or_insert(StructureError::MissingEntry { map: "put".into(), key });
                    a.to_string()
                })
            },
        );
        match missing.into_inner() {
            Some(err) => Err(err),
            None => lens,
        }
    }

    pub fn identity<S: AsRef<str>>(set: &[S]) -> std::result::Result<Self, StructureError> {
        StateLens::new(set, set, |a| a.to_string(), |_, b| b.to_string())
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    pub fn view(&self) -> &[String] {
        &self.view
    }

    pub fn get(&self, a: usize) -> usize {
        self.get[a]
    }

    pub fn put(&self, a: usize, b: usize) -> usize {
        self.put[a * self.view.len() + b]
    }

    pub fn get_named(&self, a: &str) -> Option<&str> {
        let i = self.source.binary_search_by(|x| x.as_str().cmp(a)).ok()?;
        Some(&self.view[self.get[i]])
    }

    pub fn put_named(&self, a: &str, b: &str) -> Option<&str> {
        let i = self.source.binary_search_by(|x| x.as_str().cmp(a)).ok()?;
        let j = self.view.binary_search_by(|x| x.as_str().cmp(b)).ok()?;
        Some(&self.source[self.put(i, j)])
    }

    pub fn validate(&self) -> ValidationReport {
        validate_state_lens(self)
    }
}

/// Put-Get, Get-Put and Put-Put, each checked at every point.
pub fn validate_state_lens(lens: &StateLens) -> ValidationReport {
    let mut report = ValidationReport::new();
    for (a, an) in lens.source.iter().enumerate() {
        for (b, bn) in lens.view.iter().enumerate() {
            if lens.get(lens.put(a, b)) != b {
                report.fail("put-get", [an, bn]);
            }
        }
        if lens.put(a, lens.get(a)) != a {
            report.fail("get-put", [an]);
        }
        for (b, bn) in lens.view.iter().enumerate() {
            for (b2, b2n) in lens.view.iter().enumerate() {
                if lens.put(lens.put(a, b), b2) != lens.put(a, b2) {
                    report.fail("put-put", [an, bn, b2n]);
                }
            }
        }
    }
    report
}

/// Lens between the codiscrete categories on the two sets: the update
/// `(get a, b)` at `a` lifts to `(a, put(a, b))`.
pub fn state_lens_to_internal(lens: &StateLens) -> Result<FinLens> {
    lens.validate().into_result("state lens")?;
    let a = Arc::new(codiscrete(&lens.source)?);
    let b = Arc::new(codiscrete(&lens.view)?);
    let (na, nb) = (lens.source.len(), lens.view.len());
    // codiscrete morphisms are sorted pair tokens; look them up by name.
    let a_mor =
        |x: usize, y: usize| a.mor_id(&crate::category::pair_token(&lens.source[x], &lens.source[y])).expect("pair");
    let b_mor =
        |x: usize, y: usize| b.mor_id(&crate::category::pair_token(&lens.view[x], &lens.view[y])).expect("pair");
    let f0: Vec<usize> = (0..na).map(|x| lens.get(x)).collect();
    let mut f1 = vec![0; a.morphism_count()];
    for x in 0..na {
        for y in 0..na {
            f1[a_mor(x, y)] = b_mor(lens.get(x), lens.get(y));
        }
    }
    let get = FinFunctor::new(a.clone(), b.clone(), f0.clone(), f1)?;
    let anchors = Anchors::new(&a, &b, &f0);
    let mut phi1 = Vec::with_capacity(anchors.len());
    let mut p0 = Vec::with_capacity(anchors.len());
    for &(x, u) in anchors.pairs() {
        let y = lens.put(x, b.cod(u));
        phi1.push(a_mor(x, y));
        p0.push(y);
    }
    debug_assert_eq!(anchors.len(), na * nb);
    let put = FinCofunctor::new(a, b, f0, phi1, p0)?;
    Ok(FinLens::new(get, put)?)
}

/// Composite with Get `g∘f` and Put `(a, c) ↦ p(a, q(f a, c))`.
pub fn compose_state_lenses(first: &StateLens, second: &StateLens) -> Result<StateLens> {
    require(first.view == second.source, || {
        "view of the first state lens differs from the source of the second".into()
    })?;
    let nc = second.view.len();
    let get = first.get.iter().map(|&b| second.get[b]).collect();
    let mut put = Vec::with_capacity(first.source.len() * nc);
    for a in 0..first.source.len() {
        for c in 0..nc {
            put.push(first.put(a, second.put(first.get(a), c)));
        }
    }
    Ok(StateLens { source: first.source.clone(), view: second.view.clone(), get, put })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projection() -> StateLens {
        // A = X × Y, B = X with X = Y = {0, 1}.
        let a = ["0.0", "0.1", "1.0", "1.1"];
        StateLens::new(&a, &["0", "1"], |s| s[..1].to_string(), |s, x| format!("{x}{}", &s[1..])).unwrap()
    }

    #[test]
    fn projection_lens_is_well_behaved() {
        assert!(projection().validate().is_valid());
    }

    #[test]
    fn ignoring_updates_breaks_put_get() {
        let l = StateLens::new(&["0", "1"], &["0", "1"], |a| a.to_string(), |a, _| a.to_string()).unwrap();
        let report = l.validate();
        assert!(report.has_law("put-get"));
        assert!(!report.has_law("get-put"));
    }

    #[test]
    fn identity_state_lens() {
        let id = StateLens::identity(&["a", "b", "c"]).unwrap();
        assert!(id.validate().is_valid());
        let l = projection();
        let src_id = StateLens::identity(l.source()).unwrap();
        let view_id = StateLens::identity(l.view()).unwrap();
        assert_eq!(compose_state_lenses(&src_id, &l).unwrap(), l);
        assert_eq!(compose_state_lenses(&l, &view_id).unwrap(), l);
    }

    #[test]
    fn embedding_has_product_many_anchors() {
        let l = projection();
        let internal = state_lens_to_internal(&l).unwrap();
        assert_eq!(internal.put().anchors().len(), 8);
        assert!(internal.validate_all().is_valid());
    }

    #[test]
    fn from_named_reports_missing_put_entries() {
        let r = StateLens::from_named(&["a"], &["x"], &[("a", "x")], &[]);
        assert!(matches!(r, Err(StructureError::MissingEntry { .. })));
        let ok = StateLens::from_named(&["a"], &["x"], &[("a", "x")], &[("a|x", "a")]).unwrap();
        assert!(ok.validate().is_valid());
    }
}
