//! Property tests for the invariants of each module.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphereiso::lamperti::{canonical_density, canonical_weight, check_isometry, LampertiOperator};
use sphereiso::lp_geometry::{dist_restricted_sphere, LpVector, SphereVector};
use sphereiso::radon_nikodym::{differ_on_non_null, rn_conditions, rn_derivative, rn_solve_bruteforce, satisfies, Scope, SubSigmaAlgebra};
use sphereiso::suites::{planted_operator, random_space, weight_grid};
use sphereiso::sup_sphere::{extract_homeo, sharp_of_family, sharp_of_set, HomeoConfig, PermutationOracle, PointSpace, SupVector};
use sphereiso::tingley::{random_sphere_vector, PlantedOracle, SphereMap};
use sphereiso::{
    check_regular_set_iso, AtomSet, CheckConfig, Exact, Exponent, FiniteMeasureSpace, RegularSetIso, Scalar, SetRing, Weight,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subset(rng: &mut ChaCha8Rng, n: usize) -> AtomSet {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

fn grid_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMeasureSpace<Exact> {
    let grid = weight_grid();
    FiniteMeasureSpace::new((0..n).map(|i| (format!("a{i}"), grid[rng.gen_range(0..grid.len())].clone()))).unwrap()
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]).prop_map(|p| Exponent::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn null_classes_form_a_boolean_algebra(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let space = grid_space(&mut r, n);
        let [a, b, c] = [0, 1, 2].map(|_| space.class_of(&subset(&mut r, n)));
        let top = space.class_of(&space.all());
        let bottom = space.class_of(&AtomSet::empty());
        prop_assert_eq!(a.meet(&b.join(&c)), a.meet(&b).join(&a.meet(&c)));
        prop_assert_eq!(a.join(&b.meet(&c)), a.join(&b).meet(&a.join(&c)));
        prop_assert_eq!(a.join(&a.meet(&b)), a.clone());
        prop_assert_eq!(a.join(&a.complement(&space)), top.clone());
        prop_assert_eq!(a.meet(&a.complement(&space)), bottom.clone());
        prop_assert_eq!(a.join(&b).complement(&space), a.complement(&space).meet(&b.complement(&space)));
        prop_assert!(bottom.le(&a) && a.le(&top));
        prop_assert_eq!(a.le(&b), a.meet(&b) == a);
    }

    #[test]
    fn order_and_equivalence_ignore_null_atoms(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let space = grid_space(&mut r, n);
        let a = subset(&mut r, n);
        let with_null = a.union(&space.null_atoms());
        prop_assert!(space.equiv(&a, &with_null));
        let b = subset(&mut r, n);
        prop_assert_eq!(space.preceq(&a, &b), space.class_of(&a).le(&space.class_of(&b)));
        prop_assert_eq!(space.equiv(&a, &b), space.preceq(&a, &b) && space.preceq(&b, &a));
    }

    #[test]
    fn set_classes_form_a_chain(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let space = grid_space(&mut r, n);
        let a = subset(&mut r, n);
        let c = space.classify(&a);
        prop_assert!(!c.in_a0 || c.in_af);
        prop_assert!(!c.in_af || c.in_asigma);
        prop_assert!(!c.in_asigma || c.in_asigma_c_sigma);
        prop_assert_eq!(c.in_asigma, a.is_subset(space.finite_atoms()));
    }

    #[test]
    fn essential_supremum_is_the_least_upper_bound(seed in any::<u64>(), n in 1usize..8, k in 0usize..5) {
        let mut r = rng(seed);
        let space = grid_space(&mut r, n);
        let family: Vec<AtomSet> = (0..k).map(|_| subset(&mut r, n)).collect();
        let sup = space.essential_supremum(&family);
        for s in &family {
            prop_assert!(space.class_of(s).le(&sup));
        }
        let bound = family.iter().fold(subset(&mut r, n), |acc, s| acc.union(s));
        prop_assert!(sup.le(&space.class_of(&bound)));
    }

    #[test]
    fn atom_bijections_pass_every_condition(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let op = planted_operator::<Exact>(&mut r, n, Exponent::new(1.0).unwrap()).unwrap();
        let iso = op.iso();
        let cert = check_regular_set_iso(iso.domain(), iso.codomain(), SetRing::Sigma, &|a| iso.apply(a), &CheckConfig::default()).unwrap();
        prop_assert!(cert.passed());
        let a = subset(&mut r, n);
        prop_assert_eq!(iso.preimage(&iso.apply(&a)), a);
    }

    #[test]
    fn non_injective_maps_fail_the_conditions(seed in any::<u64>(), n in 2usize..7) {
        let mut r = rng(seed);
        let space = random_space::<Exact>(&mut r, n, false);
        let target = r.gen_range(0..n);
        let collapse = |a: &AtomSet| if a.is_empty() { AtomSet::empty() } else { AtomSet::singleton(target) };
        let cert = check_regular_set_iso(&space, &space, SetRing::Sigma, &collapse, &CheckConfig::default()).unwrap();
        prop_assert!(!cert.defining_passed());
    }

    #[test]
    fn densities_compose(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let p = Exponent::new(1.0).unwrap();
        let first = planted_operator::<Exact>(&mut r, n, p).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        let kappa = Arc::new(random_space::<Exact>(&mut r, n, false));
        let nu = first.iso().codomain().clone();
        let second = RegularSetIso::new(nu.clone(), kappa.clone(), (0..n).map(|y| (y, perm[y]))).unwrap();
        let composed = RegularSetIso::new(first.iso().domain().clone(), kappa, first.iso().pairs().map(|(a, y)| (a, perm[y]))).unwrap();
        let d1 = canonical_density(first.iso()).unwrap();
        let d2 = canonical_density(&second).unwrap();
        let d3 = canonical_density(&composed).unwrap();
        for y in 0..n {
            prop_assert_eq!(d3[perm[y]].clone(), d2[perm[y]].clone() * d1[y].clone());
        }
    }

    #[test]
    fn restriction_keeps_the_local_weight(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let p = Exponent::new(2.0).unwrap();
        let op = planted_operator::<Exact>(&mut r, n, p).unwrap();
        let e = subset(&mut r, n);
        let local = op.iso().restrict(&e).unwrap();
        let h_local = canonical_weight(&local.iso, p).unwrap();
        for (k, &y) in local.codomain_atoms.iter().enumerate() {
            prop_assert_eq!(h_local[k].clone(), op.h()[y].clone());
        }
    }

    #[test]
    fn supports_move_with_the_atom_map(seed in any::<u64>(), n in 1usize..10, p in exponent()) {
        let mut r = rng(seed);
        let op = planted_operator::<f64>(&mut r, n, p).unwrap();
        let f = random_sphere_vector(&mut r, op.iso().domain(), p).unwrap();
        let tf = op.apply(f.as_vector()).unwrap();
        prop_assert_eq!(tf.support(), op.iso().apply(&f.as_vector().support()));
    }

    #[test]
    fn planted_maps_preserve_distances(seed in any::<u64>(), n in 1usize..10, p in exponent()) {
        let mut r = rng(seed);
        let op = planted_operator::<f64>(&mut r, n, p).unwrap();
        let oracle = PlantedOracle::new(op.clone());
        let f = random_sphere_vector(&mut r, op.iso().domain(), p).unwrap();
        let g = random_sphere_vector(&mut r, op.iso().domain(), p).unwrap();
        let before = f.dist(&g).unwrap();
        let after = oracle.eval(&f).unwrap().dist(&oracle.eval(&g).unwrap()).unwrap();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        prop_assert!(check_isometry(&op, 8, seed, 1e-12).passed);
    }

    #[test]
    fn exact_operators_are_isometries(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let p = Exponent::new(2.0).unwrap();
        let op = planted_operator::<Exact>(&mut r, n, p).unwrap();
        let f = LpVector::new(op.iso().domain().clone(), (0..n).map(|_| Exact::from_f64_lossy(r.gen_range(-8..=8) as f64 / 4.0)).collect(), p).unwrap();
        prop_assert_eq!(op.apply(&f).unwrap().norm_pow(), f.norm_pow());
        let canonical = LampertiOperator::canonical(op.iso().clone(), p).unwrap();
        prop_assert_eq!(canonical.h(), op.h());
    }

    #[test]
    fn restricted_distance_is_optimal_and_monotone(seed in any::<u64>(), n in 1usize..7, p in exponent()) {
        let mut r = rng(seed);
        let space = Arc::new(random_space::<f64>(&mut r, n, false));
        let f = random_sphere_vector(&mut r, &space, p).unwrap();
        let mut small = subset(&mut r, n);
        small.insert(r.gen_range(0..n));
        let large = small.union(&subset(&mut r, n));
        let d_small = dist_restricted_sphere(&f, &small).unwrap();
        let d_large = dist_restricted_sphere(&f, &large).unwrap();
        prop_assert!(d_large <= d_small + 1e-12);
        for _ in 0..16 {
            let values = (0..n).map(|i| if small.contains(i) { r.gen::<f64>() } else { 0.0 }).collect();
            let Ok(g) = SphereVector::normalize(LpVector::new(space.clone(), values, p).unwrap()) else { continue };
            prop_assert!(f.dist(&g).unwrap() >= d_small - 1e-12);
        }
        let outside = small.complement(n);
        let disjoint = f.as_vector().restrict(&outside);
        if let Ok(h) = SphereVector::normalize(disjoint) {
            let target = h.as_vector().support().complement(n);
            if !target.is_empty() {
                prop_assert_eq!(dist_restricted_sphere(&h, &target).unwrap(), 2f64.powf(1.0 / p.get()));
            }
        }
    }

    #[test]
    fn predicted_densities_solve_and_witnesses_differ(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let nu = grid_space(&mut r, n);
        let grid = weight_grid();
        let mut blocks: Vec<AtomSet> = Vec::new();
        for a in 0..n {
            let k = r.gen_range(0..=blocks.len());
            if k == blocks.len() { blocks.push(AtomSet::singleton(a)) } else { blocks[k].insert(a) }
        }
        let lambda: Vec<Weight<Exact>> = blocks.iter().map(|_| grid[r.gen_range(0..grid.len())].clone()).collect();
        let c = SubSigmaAlgebra::new(&nu, blocks, lambda).unwrap();
        let cond = rn_conditions(&nu, &c);
        for scope in Scope::ALL {
            let pred = cond.prediction(scope);
            match rn_derivative(&nu, &c, scope) {
                Ok(sol) => {
                    prop_assert!(pred.exists);
                    prop_assert!(satisfies(&nu, &c, &sol.g, scope, 0.0));
                    prop_assert_eq!(Some(sol.unique_mod_null), pred.unique);
                }
                Err(_) => prop_assert!(!pred.exists),
            }
            let brute = rn_solve_bruteforce(&nu, &c, scope);
            prop_assert_eq!(brute.is_some(), pred.exists);
            if let Some(sol) = brute {
                prop_assert_eq!(Some(sol.unique_mod_null), pred.unique);
                prop_assert!(satisfies(&nu, &c, &sol.g, scope, 0.0));
                if let Some(w) = &sol.witness {
                    prop_assert!(satisfies(&nu, &c, w, scope, 0.0));
                    prop_assert!(differ_on_non_null(&nu, &sol.g, w, 0.0));
                }
            }
        }
    }

    #[test]
    fn permutations_round_trip(seed in any::<u64>(), n in 1usize..40) {
        let oracle = PermutationOracle::random(n, seed);
        let rep = extract_homeo::<f64>(&oracle, &HomeoConfig { seed, n_random: 16, ..HomeoConfig::default() }).unwrap();
        prop_assert!(rep.passed());
        prop_assert_eq!(rep.sigma.as_deref(), Some(oracle.sigma()));
    }

    #[test]
    fn sharp_is_antitone_and_triple_sharp_is_single(seed in any::<u64>(), n in 1usize..6, k in 1usize..4) {
        let mut r = rng(seed);
        let space = Arc::new(PointSpace::numbered(n));
        let draw = |r: &mut ChaCha8Rng| {
            let mut v: Vec<f64> = (0..n).map(|_| r.gen_range(0..=4) as f64 / 4.0).collect();
            v[r.gen_range(0..n)] = 1.0;
            SupVector::new(space.clone(), v).unwrap()
        };
        let small: Vec<SupVector<f64>> = (0..k).map(|_| draw(&mut r)).collect();
        let mut large = small.clone();
        large.push(draw(&mut r));
        let (s1, s2) = (sharp_of_set(n, &small).unwrap(), sharp_of_set(n, &large).unwrap());
        prop_assert!(s2.is_subset(&s1));
        let twice = sharp_of_family(&s1);
        prop_assert_eq!(sharp_of_family(&twice), s1);
    }
}
