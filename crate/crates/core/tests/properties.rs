mod support;

use proptest::prelude::*;

use support::{naive_count, random_graph, random_permutation, relabel};
use vmagic::abelian::{enumerate_abelian_groups, GroupElement, GroupSpec};
use vmagic::families::{build, FamilyId, FamilyInstance};
use vmagic::graphcore::canonical_code;
use vmagic::labeling::{verify_magic, Labeling};
use vmagic::solver::{count_magic, exists_magic, SolveStatus};

fn groups(max: usize) -> Vec<GroupSpec> {
    enumerate_abelian_groups(max)
}

fn group_strategy(max: usize) -> impl Strategy<Value = GroupSpec> {
    proptest::sample::select(groups(max))
}

fn element(a: &GroupSpec, i: usize) -> GroupElement {
    a.element_at(i % a.order())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn group_axioms(a in group_strategy(16), i in 0usize..64, j in 0usize..64, k in 0usize..64) {
        let (x, y, z) = (element(&a, i), element(&a, j), element(&a, k));
        let add = |p: &GroupElement, q: &GroupElement| a.add(p, q).unwrap();
        prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
        prop_assert_eq!(add(&x, &y), add(&y, &x));
        prop_assert_eq!(add(&x, &a.zero()), x.clone());
        prop_assert!(add(&x, &a.neg(&x).unwrap()).is_zero());
        prop_assert_eq!(a.sub(&x, &y).unwrap(), add(&x, &a.neg(&y).unwrap()));
        prop_assert_eq!(a.scalar_mul(3, &x).unwrap(), add(&add(&x, &x), &x));
        prop_assert_eq!(a.scalar_mul(-1, &x).unwrap(), a.neg(&x).unwrap());
    }

    #[test]
    fn orders_divide_exponent_and_exponent_divides_order(a in group_strategy(16), i in 0usize..64) {
        let x = element(&a, i);
        let o = a.element_order(&x).unwrap();
        prop_assert_eq!(a.exponent() % o, 0);
        prop_assert_eq!(a.order() as u64 % a.exponent(), 0);
        prop_assert!(a.scalar_mul(o as i64, &x).unwrap().is_zero());
        prop_assert_eq!(a.index_of(&x).unwrap(), i % a.order());
    }

    #[test]
    fn canonical_form_is_isomorphic(a in group_strategy(16)) {
        let c = a.canonical();
        prop_assert!(c.is_canonical());
        prop_assert!(a.is_isomorphic(&c));
        prop_assert_eq!(c.order(), a.order());
        prop_assert_eq!(c.exponent(), a.exponent());
        prop_assert_eq!(c.to_string().parse::<GroupSpec>().unwrap(), c);
    }

    #[test]
    fn decompose_sum_exactness(a in group_strategy(8), i in 0usize..8, n in 0usize..7) {
        let t = element(&a, i);
        let z2_parity_breaks = a.order() == 2 && (n % 2 == 1) == t.is_zero();
        let feasible = match n {
            0 => t.is_zero(),
            1 => !t.is_zero(),
            _ => !z2_parity_breaks,
        };
        match a.decompose_sum(&t, n) {
            Ok(parts) => {
                prop_assert!(feasible);
                prop_assert_eq!(parts.len(), n);
                prop_assert!(parts.iter().all(|p| !p.is_zero()));
                let sum = parts.iter().fold(a.zero(), |s, p| a.add(&s, p).unwrap());
                prop_assert_eq!(sum, t);
            }
            Err(_) => prop_assert!(!feasible),
        }
    }

    #[test]
    fn canonical_code_ignores_vertex_names(n in 2usize..11, extra in 0usize..6, seed in any::<u64>(), pseed in any::<u64>()) {
        let g = random_graph(n, extra, seed);
        let h = relabel(&g, &random_permutation(n, pseed));
        prop_assert_eq!(canonical_code(&g).unwrap(), canonical_code(&h).unwrap());
    }

    #[test]
    fn canonical_code_separates_degree_sequences(n in 3usize..10, seed in any::<u64>(), s2 in any::<u64>()) {
        let g = random_graph(n, 2, seed);
        let h = random_graph(n, 2, s2);
        let degrees = |g: &vmagic::graphcore::Graph| {
            let mut d: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
            d.sort_unstable();
            d
        };
        if degrees(&g) != degrees(&h) {
            prop_assert_ne!(canonical_code(&g).unwrap(), canonical_code(&h).unwrap());
        }
    }

    #[test]
    fn magicness_survives_relabeling_vertices(n in 2usize..9, extra in 0usize..4, seed in any::<u64>(), a in group_strategy(6), lseed in any::<u64>()) {
        let g = random_graph(n, extra, seed);
        let values: Vec<GroupElement> = (0..n)
            .map(|v| element(&a, 1 + (lseed as usize).wrapping_add(v * 7) % (a.order() - 1)))
            .collect();
        let l = Labeling::new(a.clone(), values).unwrap();
        let perm = random_permutation(n, lseed);
        let moved = verify_magic(&relabel(&g, &perm), &l.permuted(&perm)).unwrap();
        prop_assert_eq!(verify_magic(&g, &l).unwrap().map(|c| c.mu), moved.map(|c| c.mu));
    }

    #[test]
    fn witnesses_survive_relabeling_and_automorphisms(n in 3usize..9, extra in 0usize..4, seed in any::<u64>(), a in group_strategy(8), pseed in any::<u64>()) {
        let g = random_graph(n, extra, seed);
        let outcome = exists_magic(&g, &a).unwrap();
        let h = relabel(&g, &random_permutation(n, pseed));
        prop_assert_eq!(exists_magic(&h, &a).unwrap().status, outcome.status);
        if let Some((l, cert)) = outcome.witness {
            for auto in a.automorphisms().unwrap() {
                let phi = |x: &GroupElement| a.element_at(auto[a.index_of(x).unwrap()]);
                let image = l.map_elements(phi).unwrap();
                let c = verify_magic(&g, &image).unwrap();
                prop_assert_eq!(c.map(|c| c.mu), Some(phi(&cert.mu)));
            }
        }
    }

    #[test]
    fn solver_matches_brute_force(n in 2usize..8, extra in 0usize..4, seed in any::<u64>(), a in group_strategy(5)) {
        let g = random_graph(n, extra, seed);
        let expected = naive_count(&g, &a);
        let outcome = exists_magic(&g, &a).unwrap();
        prop_assert_eq!(outcome.status == SolveStatus::Witness, expected > 0);
        prop_assert_eq!(count_magic(&g, &a).unwrap(), expected);
    }

    #[test]
    fn instances_round_trip_through_text(p1 in 0usize..4, p2 in 0usize..4, hub in proptest::collection::vec(1usize..4, 1..3)) {
        let i = FamilyInstance::with_hub(FamilyId::H1, vec![p1, p2], hub);
        prop_assert_eq!(i.to_string().parse::<FamilyInstance>().unwrap(), i.clone());
        if let Ok(b) = build(&i) {
            prop_assert_eq!(b.graph.n(), i.vertex_count());
        }
    }
}
