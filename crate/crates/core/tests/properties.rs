use geomod_core::coxeter_index::{check_covariance, generate_group, InvolutionFamily, Permutation};
use geomod_core::desitter::{act_lorentz, ds_disjoint, ds_reconstruct, random_ds_wedge, LorentzOracle};
use geomod_core::feasibility::wedges_intersect;
use geomod_core::minkowski::{are_disjoint, characteristic_data, is_subset, Wedge};
use geomod_core::modular_findim::{left_qubit, modular_objects, tomita_report, StateVector};
use geomod_core::poincare::{wedge_reflection, Act};
use geomod_core::reconstruction::{reconstruct, PointMapOracle};
use geomod_core::sampling;
use geomod_core::sl2c::covering_map;
use geomod_core::suites::{disjoint_pair, maximal_by_enlargement, ENLARGEMENT_EPS};
use proptest::prelude::*;

fn pair(seed: u64) -> (Wedge, Wedge) {
    let mut rng = sampling::rng(seed);
    let a = sampling::wedge(&mut rng);
    let b = if seed % 2 == 0 { sampling::wedge(&mut rng) } else { a.causal_complement().translate(sampling::four_vector(&mut rng, 1.0)) };
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_is_an_involution(seed in any::<u64>()) {
        let w = sampling::wedge(&mut sampling::rng(seed));
        prop_assert_eq!(w.causal_complement().causal_complement(), w);
        prop_assert!(are_disjoint(&w, &w.causal_complement()));
    }

    #[test]
    fn disjointness_matches_feasibility(seed in any::<u64>()) {
        let (a, b) = pair(seed);
        prop_assert_eq!(are_disjoint(&a, &b), are_disjoint(&b, &a));
        prop_assert_eq!(are_disjoint(&a, &b), !wedges_intersect(&[a, b]));
    }

    #[test]
    fn maximal_pairs_cannot_be_enlarged(seed in any::<u64>(), kind in 0usize..4) {
        let (a, b, _) = disjoint_pair(&mut sampling::rng(seed), kind);
        let maximal = geomod_core::is_maximal_pair(&a, &b);
        prop_assert_eq!(maximal, Ok(maximal_by_enlargement(&a, &b, ENLARGEMENT_EPS)));
    }

    #[test]
    fn family_members_are_nested(seed in any::<u64>(), x in -10.0..10.0f64, y in -10.0..10.0f64) {
        let w = sampling::wedge(&mut sampling::rng(seed));
        for f in [characteristic_data(&w).f_plus, characteristic_data(&w).f_minus] {
            let (p, q) = (f.member(x), f.member(y));
            prop_assert!(is_subset(&p, &q) || is_subset(&q, &p));
        }
    }

    #[test]
    fn poincare_action_respects_composition(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let (a, b) = (sampling::restricted_element(&mut rng), sampling::restricted_element(&mut rng));
        let w = sampling::wedge(&mut rng);
        prop_assert!((a * b).act(&w).distance(&a.act(&b.act(&w))) < 1e-9);
        prop_assert!(a.act(&w.causal_complement()).distance(&a.act(&w).causal_complement()) < 1e-9);
    }

    #[test]
    fn reflections_are_covariant_involutions(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let l = sampling::restricted_element(&mut rng);
        let w = sampling::wedge(&mut rng);
        let g = wedge_reflection(&w);
        prop_assert!((g * g).max_abs_diff(&geomod_core::PoincareElement::identity()) < 1e-9);
        prop_assert!(g.act(&w).approx_eq(&w.causal_complement(), 1e-8));
        prop_assert!(wedge_reflection(&l.act(&w)).max_abs_diff(&(l * g * l.inverse())) < 1e-9);
    }

    #[test]
    fn covering_is_a_homomorphism(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let (a, b) = (sampling::sl2c(&mut rng), sampling::sl2c(&mut rng));
        prop_assert!((covering_map(&a) * covering_map(&b)).max_abs_diff(&covering_map(&(a * b))) < 1e-9);
        prop_assert!(covering_map(&a).max_abs_diff(&covering_map(&a.neg())) < 1e-12);
    }

    #[test]
    fn point_map_oracles_reconstruct(seed in any::<u64>()) {
        let e = sampling::extended_element(&mut sampling::rng(seed), 0.5, 2.0);
        let r = reconstruct(&PointMapOracle::new(e)).unwrap();
        prop_assert!(r.element.max_abs_diff(&e) < 1e-6);
    }

    #[test]
    fn lorentz_maps_preserve_ds_disjointness(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let (a, b) = (random_ds_wedge(&mut rng), random_ds_wedge(&mut rng));
        let l = sampling::restricted_lorentz(&mut rng, 1.5);
        prop_assert_eq!(ds_disjoint(&a, &b), ds_disjoint(&act_lorentz(&l, &a), &act_lorentz(&l, &b)));
        prop_assert!(ds_disjoint(&a, &a.causal_complement()));
        let r = ds_reconstruct(&LorentzOracle(l), 10, seed).unwrap();
        prop_assert!(r.lambda.max_abs_diff(&l) < 1e-6);
    }

    #[test]
    fn tomita_identities_hold_for_schmidt_states(p in 0.05..0.95f64) {
        let omega = StateVector::schmidt(&[p, 1.0 - p]).unwrap();
        let m = left_qubit();
        let mo = modular_objects(&m, &omega).unwrap();
        prop_assert!(tomita_report(&m, &omega, &mo).passes(1e-8));
    }

    #[test]
    fn permutation_inverse_and_involutions(images in Just((0..5).collect::<Vec<usize>>()).prop_shuffle()) {
        let p = Permutation::from_images(images).unwrap();
        prop_assert!(p.compose(&p.inverse()).is_identity());
        let conj: Vec<Permutation> = [(1, 2), (3, 4)]
            .iter()
            .map(|&(i, j)| p.compose(&Permutation::transposition(5, i, j)).compose(&p.inverse()))
            .collect();
        prop_assert!(conj.iter().all(Permutation::is_involution));
        let group = generate_group(5, &conj, 1000).unwrap();
        prop_assert_eq!(group.len(), 4);
    }

    #[test]
    fn constant_families_are_covariant(a in 0usize..4, b in 0usize..4) {
        prop_assume!(a != b);
        // τ_{τᵢ(j)} = t = t t t for a constant involution t
        let t = Permutation::transposition(4, a, b);
        let f = InvolutionFamily::new(vec![t; 4]).unwrap();
        prop_assert!(check_covariance(&f));
    }
}
