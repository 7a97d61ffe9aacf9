mod common;

use deforma::artin::{tensor_nilpotent, ArtinAlgebra};
use deforma::cartan::CartanHomotopy;
use deforma::graded::GradedMap;
use deforma::mc::{self, Extension};
use deforma::period::{self, contraction_cartan, period_differential};
use deforma::sample;
use proptest::prelude::*;

#[test]
fn contraction_identities_hold_on_every_period_fixture() {
    for name in ["torus", "jets", "elliptic"] {
        let m = common::load(name);
        let doc = m.cartan_doc("i").unwrap();
        let omega = m.cdga(doc.cdga.as_deref().unwrap()).unwrap();
        let (_, f) = m.filtration(doc.filtration.as_deref().unwrap()).unwrap();
        let i = m.cartan_homotopy("i").unwrap();
        let images: Vec<_> = (0..i.source.dim()).map(|a| i.i(a)).collect();
        let (_, r) = contraction_cartan(omega, &i.source, &images, Some(f)).unwrap();
        assert!(r.cartan.is_cartan(), "{name}");
        assert!(r.defining_equation && r.lie_bracket && r.lie_chain, "{name}");
        assert_eq!(r.preserves_filtration, Some(true), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn period_images_lie_in_the_end(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        for name in ["torus", "elliptic"] {
            let m = common::load(name);
            let doc = m.cartan_doc("i").unwrap();
            let omega = m.cdga(doc.cdga.as_deref().unwrap()).unwrap();
            let (_, f) = m.filtration(doc.filtration.as_deref().unwrap()).unwrap();
            let fixed = m.cartan_homotopy("i").unwrap();
            let (g, h) = (&fixed.source, &fixed.target);
            let images: Vec<_> = (0..g.dim())
                .map(|a| sample::homogeneous(&mut rng, h.space(), g.space().degree(a) - 1, 0.5))
                .collect();
            let map = GradedMap::from_images(g.space().clone(), h.space().clone(), -1, &images).unwrap();
            let i = CartanHomotopy::new(g.clone(), h.clone(), map).unwrap();
            let d = period_differential(omega, &i, f).unwrap();
            prop_assert!(d.in_end, "{}", name);
            prop_assert!(d.rank <= d.h1_dim.min(d.end_dim));
        }
    }
}

#[test]
fn torus_period_differential_sees_only_the_flag() {
    let m = common::load("torus");
    let omega = m.cdga("omega").unwrap();
    let (_, f) = m.filtration("degree").unwrap();
    let d = period_differential(omega, m.cartan_homotopy("i").unwrap(), f).unwrap();
    assert!(d.in_end);
    assert_eq!(d.h1_dim, m.dglas["t"].complex().cohomology().rank(1));
}

#[test]
fn elliptic_deformations_are_unobstructed() {
    let m = common::load("elliptic");
    let g = m.dgla("g").unwrap();
    assert!(g.is_abelian());
    let h2 = g.complex().cohomology();
    let a = ArtinAlgebra::truncated_polynomial(1, 5).unwrap();
    let host = tensor_nilpotent(g, &a).unwrap();
    let mut x = m.element_in("first_order", host.dgla().space()).unwrap();
    for j in 2..=4 {
        match mc::mc_extend_order(&host, &h2, &x, j).unwrap() {
            Extension::Lifted(y) => x = y,
            Extension::Obstructed(o) => panic!("obstructed at order {}", o.order),
        }
    }
    assert!(mc::is_mc(host.dgla(), &x).unwrap());
}

#[test]
fn period_differential_needs_a_formal_model() {
    let m = common::load("jets");
    let omega = m.cdga("omega").unwrap();
    let (_, f) = m.filtration("hodge").unwrap();
    let r = period_differential(omega, m.cartan_homotopy("i").unwrap(), f);
    assert!(matches!(r, Err(deforma::Error::Unsupported(_))));
}

#[test]
fn obstruction_of_the_obstructed_model_dies_in_the_flag_side() {
    let m = common::load("obstructed");
    let g = m.dgla("g").unwrap();
    let h2 = g.complex().cohomology();
    let a = ArtinAlgebra::truncated_polynomial(1, 3).unwrap();
    let host = tensor_nilpotent(g, &a).unwrap();
    let x = m.element_in("first_order", host.dgla().space()).unwrap();
    let o = mc::extend_all(&host, &h2, &x).unwrap().obstruction.unwrap();
    let torus = common::load("torus");
    let end = period::build_end_dgla(torus.cdga("omega").unwrap()).unwrap();
    let n = period::filtered_subdgla(&end, &torus.filtration("degree").unwrap().1).unwrap();
    let i = CartanHomotopy::zero(g, end.dgla());
    let image = period::obstruction_image(&i, &n, &host, &h2, &o).unwrap();
    assert!(image.is_zero);
    assert_eq!(image.order, 2);
}

/// `V = K{a1, a2} -> K{b1, b2}` with `d a1 = b2`, flagged by `F¹ = {a2, b2}`; `i_x` is the
/// nilpotent `a2 ↦ a1, b2 ↦ b1` and `i_y = [i_x, d i_x]`. The flag does not split `d`, so
/// `H(n) -> H(h)` is not injective and the obstruction survives in the image.
#[test]
fn obstruction_survives_when_the_sub_is_not_injective_in_cohomology() {
    use deforma::complex::{self, Complex};
    use deforma::endo::EndDgla;
    use deforma::graded::GradedSpace;
    use deforma::linalg::{self, Matrix};
    use deforma::period::FiltrationData;
    use deforma::scalar;

    let v = GradedSpace::from_degrees(&[(0, &["a1", "a2"][..]), (1, &["b1", "b2"][..])]).unwrap();
    let mut images = vec![linalg::zeros(4); 4];
    images[0][3] = scalar::one();
    let d = GradedMap::from_images(v.clone(), v.clone(), 1, &images).unwrap();
    let end = EndDgla::new(&Complex::new(v, d).unwrap()).unwrap();
    let h = end.dgla();
    let mut cols = vec![linalg::zeros(4); 4];
    cols[1][0] = scalar::one();
    cols[3][2] = scalar::one();
    let phi = end.from_matrix(&Matrix::from_columns(4, &cols)).unwrap();
    let psi = h.bracket(&phi, &h.d(&phi));
    assert!(!linalg::is_zero(&psi));

    let m = common::load("obstructed");
    let g = m.dgla("g").unwrap();
    let map = GradedMap::from_images(g.space().clone(), h.space().clone(), -1, &[phi, psi.clone()]).unwrap();
    let i = CartanHomotopy::new(g.clone(), h.clone(), map).unwrap();
    assert!(i.check().is_cartan());

    let n = period::filtered_subdgla(&end, &FiltrationData::from_weights(&[0, 1, 0, 1])).unwrap();
    assert!(!n.contains(&psi));
    for a in 0..g.dim() {
        assert!(n.contains(&i.lie_map().image(a)));
    }
    let (sub, inc) = n.as_dgla().unwrap();
    let induced = complex::induced_map_on_cohomology(&inc.map, sub.complex(), h.complex()).unwrap();
    let rank: usize = induced.blocks().values().map(|b| b.rank()).sum();
    let hn: usize = sub.complex().cohomology().ranks().values().sum();
    assert!(rank < hn);

    let h2 = g.complex().cohomology();
    let a = ArtinAlgebra::truncated_polynomial(1, 3).unwrap();
    let host = tensor_nilpotent(g, &a).unwrap();
    let x = m.element_in("first_order", host.dgla().space()).unwrap();
    let o = mc::extend_all(&host, &h2, &x).unwrap().obstruction.unwrap();
    let image = period::obstruction_image(&i, &n, &host, &h2, &o).unwrap();
    assert_eq!(image.order, 2);
    assert!(!image.is_zero);
}
