use catlens::corpus::{fixture, small_categories};
use catlens::double::{
    clens_to_internal_lens, double_functors_over, is_internal_dopf, is_split_opfibration, product_projection,
    squares_double_category, LiftTable,
};
use catlens::enumerate::SearchBudget;
use catlens::interval_n;

fn budget() -> SearchBudget {
    SearchBudget::new(u64::MAX)
}

#[test]
fn squares_double_categories_of_the_corpus_are_valid() {
    for c in small_categories(2, 4, &mut budget()).unwrap() {
        let d = squares_double_category(&c).unwrap();
        assert!(d.validate().is_valid(), "{:?}", c.morphism_names());
        assert_eq!(d.mor_cat().object_count(), c.morphism_count());
    }
    let d = squares_double_category(&interval_n(3)).unwrap();
    assert!(d.validate().is_valid());
}

#[test]
fn product_projection_lifts_are_opcartesian_and_split() {
    let a = fixture("codiscrete-2").unwrap();
    let x = fixture("z2").unwrap();
    let (proj, _) = product_projection(&a, &x).unwrap();
    let e = proj.source().clone();
    // The standard lift of u at (a, x) is (u, id_x).
    let table = LiftTable::from_fn(&proj, |o, u| {
        let fibre = e.obj_name(o).rsplit_once(',').unwrap().1.trim_end_matches(')').to_string();
        e.mor_id(&format!("({},id_{fibre})", a.mor_name(u))).unwrap()
    })
    .unwrap();
    assert!(is_split_opfibration(&proj, &table).unwrap().is_valid());
}

#[test]
fn connecting_double_functors_are_unique_on_the_fixtures() {
    let names = ["terminal", "discrete-2", "z2", "idempotent", "interval-1", "codiscrete-2", "parallel-pair"];
    for a in names {
        for x in names {
            let (a, x) = (fixture(a).unwrap(), fixture(x).unwrap());
            let (f, p) = product_projection(&a, &x).unwrap();
            let lens = clens_to_internal_lens(&f, &p, &mut budget()).unwrap();
            assert!(lens.validate().is_valid());
            assert_eq!(lens.left_candidates, 1);
            // The view-side functor is also the only internal dopf over F.
            let rights: Vec<_> = double_functors_over(&lens.apex, &lens.view, &f, &mut budget())
                .unwrap()
                .into_iter()
                .filter(|d| is_internal_dopf(d).is_valid())
                .collect();
            assert_eq!(rights, vec![lens.right.clone()]);
        }
    }
}
