use std::sync::Arc;

use catlens::corpus::{random_category, small_categories};
use catlens::enumerate::{enumerate_dopfs, enumerate_lenses, random_lens, SearchBudget};
use catlens::lens::{compose_lenses_via_pullback, lens_get, lens_objects, lens_put};
use catlens::{
    compose_cofunctors, compose_functors, compose_lenses, compose_state_lenses, dopf_to_lens, is_discrete_opfibration,
    state_lens_to_internal, FinCategory, FinLens, StateLens,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn budget() -> SearchBudget {
    SearchBudget::new(u64::MAX)
}

/// Lens chain A₀ ⇌ A₁ ⇌ ... over random categories; draws again when some
/// link admits no lens.
fn random_lens_chain(rng: &mut ChaCha8Rng, len: usize) -> Vec<FinLens> {
    loop {
        let cats: Vec<Arc<FinCategory>> =
            (0..=len).map(|_| Arc::new(random_category(3, 6, rng, &mut budget()).unwrap())).collect();
        let chain: Option<Vec<FinLens>> =
            cats.windows(2).map(|w| random_lens(&w[0], &w[1], rng, &mut budget()).unwrap()).collect();
        if let Some(chain) = chain {
            return chain;
        }
    }
}

#[test]
fn dopf_lenses_are_in_bijection_with_dopfs() {
    let cats: Vec<Arc<FinCategory>> =
        small_categories(2, 4, &mut budget()).unwrap().into_iter().map(Arc::new).collect();
    for a in &cats {
        for b in &cats {
            let lenses = enumerate_lenses(a, b, &mut budget()).unwrap();
            let dopfs = enumerate_dopfs(a, b, &mut budget()).unwrap();
            let dopf_lenses: Vec<&FinLens> = lenses
                .iter()
                .filter(|l| is_discrete_opfibration(l.get()).is_valid() && dopf_to_lens(l.get()).unwrap() == **l)
                .collect();
            assert_eq!(dopf_lenses.len(), dopfs.len());
            for f in &dopfs {
                assert!(lenses.contains(&dopf_to_lens(f).unwrap()));
            }
        }
    }
}

#[test]
fn random_larger_lenses_compose_coherently() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let chain = random_lens_chain(&mut rng, 3);
        let (l1, l2, l3) = (&chain[0], &chain[1], &chain[2]);
        for l in &chain {
            assert!(l.validate_all().is_valid());
        }
        let l12 = compose_lenses(l1, l2).unwrap();
        assert_eq!(compose_lenses_via_pullback(l1, l2).unwrap(), l12);
        let left = compose_lenses(&l12, l3).unwrap();
        let right = compose_lenses(l1, &compose_lenses(l2, l3).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(&compose_lenses(&FinLens::identity(l1.source().clone()), l1).unwrap(), l1);
        assert_eq!(&compose_lenses(l1, &FinLens::identity(l1.view().clone())).unwrap(), l1);
        // The forgetful maps commute with composition.
        assert_eq!(lens_get(&l12), &compose_functors(l1.get(), l2.get()).unwrap());
        assert_eq!(lens_put(&l12), &compose_cofunctors(l1.put(), l2.put()).unwrap());
        assert_eq!(lens_objects(&l12), lens_objects(l1));
    }
}

/// Well-behaved state lens from a bijection `source ≅ view × complement`.
fn product_lens(rng: &mut ChaCha8Rng, view: usize, complement: usize) -> StateLens {
    let source: Vec<String> = (0..view * complement).map(|i| format!("s{i}")).collect();
    let view_names: Vec<String> = (0..view).map(|i| format!("v{i}")).collect();
    let mut cells: Vec<(usize, usize)> = (0..view).flat_map(|b| (0..complement).map(move |c| (b, c))).collect();
    cells.shuffle(rng);
    let index = |s: &str| s[1..].parse::<usize>().unwrap();
    let cell_of = |s: &str| cells[index(s)];
    let element = |cell: (usize, usize)| format!("s{}", cells.iter().position(|&c| c == cell).unwrap());
    StateLens::new(&source, &view_names, |s| format!("v{}", cell_of(s).0), |s, v| element((index(v), cell_of(s).1)))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn state_lens_embedding_is_functorial(seed in any::<u64>(), b in 1usize..4, c1 in 1usize..3, c2 in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // A = B × C₁ × C₂ ⇌ B × C₁ ⇌ B; the middle set is renamed to match.
        let outer = product_lens(&mut rng, b * c1, c2);
        let inner = product_lens(&mut rng, b, c1);
        let renamed: Vec<String> = outer.view().to_vec();
        let mid_names: Vec<String> = inner.source().to_vec();
        let rename = |s: &str| renamed[mid_names.iter().position(|m| m == s).unwrap()].clone();
        let unrename = |s: &str| mid_names[renamed.iter().position(|m| m == s).unwrap()].clone();
        let inner = StateLens::new(
            &renamed,
            inner.view(),
            |s| inner.get_named(&unrename(s)).unwrap().to_string(),
            |s, v| rename(inner.put_named(&unrename(s), v).unwrap()),
        )
        .unwrap();
        prop_assert!(outer.validate().is_valid());
        prop_assert!(inner.validate().is_valid());
        let composite = compose_state_lenses(&outer, &inner).unwrap();
        prop_assert!(composite.validate().is_valid());
        let embedded = state_lens_to_internal(&composite).unwrap();
        let via = compose_lenses(&state_lens_to_internal(&outer).unwrap(), &state_lens_to_internal(&inner).unwrap()).unwrap();
        prop_assert_eq!(embedded, via);
        let id = StateLens::identity(outer.source()).unwrap();
        let embedded_id = state_lens_to_internal(&id).unwrap();
        prop_assert_eq!(&embedded_id, &FinLens::identity(embedded_id.source().clone()));
    }
}
