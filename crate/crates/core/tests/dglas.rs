mod common;

use deforma::artin::{tensor_morphism, tensor_nilpotent};
use deforma::dgla::{Dgla, DglaMorphism};
use deforma::{fixtures, linalg, sample};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// A permutation acting within each degree.
fn degree_preserving_permutation<R: Rng>(rng: &mut R, g: &Dgla) -> Vec<usize> {
    let s = g.space();
    let mut perm = Vec::new();
    for deg in s.degrees() {
        let mut block: Vec<usize> = s.range(deg).unwrap().collect();
        block.shuffle(rng);
        perm.extend(block);
    }
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn validation_ignores_basis_order(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mutated = fixtures::mutation_names().flat_map(|n| common::load(n).dglas.into_iter().map(move |(g, d)| (format!("{n}/{g}"), d)));
        for (name, g) in common::fixture_dglas().into_iter().chain(mutated) {
            let perm = degree_preserving_permutation(&mut rng, &g);
            let p = g.permuted(&perm).unwrap();
            prop_assert_eq!(p.validate().is_valid(), g.validate().is_valid(), "{}", name);
            prop_assert_eq!(p.validate().failures.len(), g.validate().failures.len(), "{}", name);
        }
    }

    #[test]
    fn nested_brackets_vanish_past_the_order(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for (name, g) in common::fixture_dglas() {
            for a in common::small_algebras() {
                let host = tensor_nilpotent(&g, &a).unwrap();
                let h = host.dgla();
                let n = a.order();
                let xs: Vec<_> = (0..n).map(|_| {
                    let deg = *h.space().degrees().choose(&mut rng).unwrap();
                    sample::homogeneous(&mut rng, h.space(), deg, 0.8)
                }).collect();
                let nested = xs[..n - 1].iter().rev().fold(xs[n - 1].clone(), |acc, x| h.bracket(x, &acc));
                prop_assert!(linalg::is_zero(&nested), "{}", name);
            }
        }
    }
}

#[test]
fn tensored_fixtures_are_dglas() {
    for (name, g) in common::fixture_dglas() {
        for a in common::small_algebras() {
            let host = tensor_nilpotent(&g, &a).unwrap();
            assert!(host.dgla().validate().is_valid(), "{name} over {:?}", a.labels());
        }
    }
}

#[test]
fn subdgla_inclusions_are_morphisms() {
    for name in fixtures::names() {
        let m = common::load(name);
        for (s, (_, n)) in &m.subdglas {
            assert!(n.closure_report().is_valid(), "{name}/{s}");
            let (sub, inclusion) = n.as_dgla().unwrap();
            assert!(sub.validate().is_valid(), "{name}/{s}");
            assert!(inclusion.validate().is_valid(), "{name}/{s}");
        }
    }
}

#[test]
fn tensoring_is_functorial() {
    let m = common::load("gl2");
    let g = m.dgla("gl2").unwrap();
    for a in common::small_algebras() {
        let id = tensor_morphism(&DglaMorphism::identity(g), &a).unwrap();
        assert!(id.validate().is_valid());
        let host = tensor_nilpotent(g, &a).unwrap();
        assert_eq!(id, DglaMorphism::identity(host.dgla()));
        for f in m.morphisms.values() {
            assert!(tensor_morphism(f, &a).unwrap().validate().is_valid());
        }
    }
    let broken = common::load("gl2_scaled_root");
    let f = broken.morphism("scale_root").unwrap();
    let a = &common::small_algebras()[1];
    assert!(!tensor_morphism(f, a).unwrap().validate().is_valid());
}

#[test]
fn mutations_fail_and_fixtures_pass() {
    for (name, g) in common::fixture_dglas() {
        assert!(g.validate().is_valid(), "{name}");
    }
    let bad = common::load("gl2_corrupted");
    let r = bad.dgla("gl2").unwrap().validate();
    assert!(r.has(deforma::report::Check::Jacobi));
}
