use std::sync::Arc;

use catlens::corpus::{random_category, small_categories};
use catlens::enumerate::{enumerate_cofunctors, random_cofunctor, SearchBudget};
use catlens::functor::is_identity_on_objects;
use catlens::{
    cofunctor_from_span, compose_cofunctors, identity_cofunctor, is_discrete_opfibration, lambda_category,
    span_of_cofunctor, FinCategory, FinCofunctor,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn budget() -> SearchBudget {
    SearchBudget::new(u64::MAX)
}

/// All maps `b → a` of monoid elements preserving the unit and "then".
fn monoid_homs(b: &FinCategory, a: &FinCategory) -> Vec<Vec<usize>> {
    let (nb, na) = (b.morphism_count(), a.morphism_count());
    let mut out = Vec::new();
    for code in 0..na.pow(nb as u32) {
        let map: Vec<usize> = (0..nb).map(|i| code / na.pow(i as u32) % na).collect();
        let unit = map[b.ident(0)] == a.ident(0);
        let mult =
            (0..nb).all(|u| (0..nb).all(|v| map[b.compose(u, v).unwrap()] == a.compose(map[u], map[v]).unwrap()));
        if unit && mult {
            out.push(map);
        }
    }
    out
}

#[test]
fn cofunctors_between_monoids_are_reversed_homomorphisms() {
    let monoids: Vec<Arc<FinCategory>> = small_categories(1, 4, &mut budget())
        .unwrap()
        .into_iter()
        .filter(|c| c.object_count() == 1)
        .map(Arc::new)
        .collect();
    assert_eq!(monoids.len(), 45);
    for a in &monoids {
        for b in &monoids {
            let mut from_cofunctors: Vec<Vec<usize>> = enumerate_cofunctors(a, b, &mut budget())
                .unwrap()
                .into_iter()
                .map(|phi| {
                    // One object, so anchors are the updates in index order.
                    (0..b.morphism_count()).map(|u| phi.lift(0, u).unwrap()).collect()
                })
                .collect();
            let mut homs = monoid_homs(b, a);
            from_cofunctors.sort();
            homs.sort();
            assert_eq!(from_cofunctors, homs);
        }
    }
}

/// 500 seeded random instances over categories with up to 3 objects and 6 morphisms.
fn random_cofunctor_chains(count: usize) -> Vec<Vec<FinCofunctor>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    while out.len() < count {
        let cats: Vec<Arc<FinCategory>> =
            (0..4).map(|_| Arc::new(random_category(3, 6, &mut rng, &mut budget()).unwrap())).collect();
        // φ: B ⇸ A has target A = cats[i] and source B = cats[i + 1].
        let chain: Option<Vec<FinCofunctor>> =
            cats.windows(2).map(|w| random_cofunctor(&w[0], &w[1], &mut rng, &mut budget()).unwrap()).collect();
        if let Some(chain) = chain {
            out.push(chain);
        }
    }
    out
}

#[test]
fn random_larger_cofunctors_compose_associatively() {
    for chain in random_cofunctor_chains(500) {
        let (phi, gamma, delta) = (&chain[0], &chain[1], &chain[2]);
        for c in &chain {
            assert!(c.validate().is_valid());
        }
        let left = compose_cofunctors(&compose_cofunctors(phi, gamma).unwrap(), delta).unwrap();
        let right = compose_cofunctors(phi, &compose_cofunctors(gamma, delta).unwrap()).unwrap();
        assert_eq!(left, right);
        assert!(left.validate().is_valid());
        assert_eq!(&compose_cofunctors(&identity_cofunctor(phi.target()), phi).unwrap(), phi);
        assert_eq!(&compose_cofunctors(phi, &identity_cofunctor(phi.source())).unwrap(), phi);
    }
}

#[test]
fn random_larger_cofunctors_round_trip_through_spans() {
    for chain in random_cofunctor_chains(100) {
        for phi in &chain {
            assert!(lambda_category(phi).unwrap().validate().is_valid());
            let span = span_of_cofunctor(phi).unwrap();
            assert!(is_discrete_opfibration(&span.left).is_valid());
            assert!(is_identity_on_objects(&span.right));
            assert_eq!(&cofunctor_from_span(&span).unwrap(), phi);
            let back = span_of_cofunctor(&cofunctor_from_span(&span).unwrap()).unwrap();
            assert_eq!(back.canonical().unwrap(), span.canonical().unwrap());
        }
    }
}
