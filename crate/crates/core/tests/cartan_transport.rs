use deforma::cartan::{gauge_zero_transport, predicted_arity_two, transport_of_l, CartanHomotopy};
use deforma::convolution::HomDgla;
use deforma::fixtures;
use deforma::linalg;
use deforma::period::contraction_cartan;

fn contraction(name: &str) -> CartanHomotopy {
    let m = fixtures::load(name).unwrap();
    let doc = m.cartan_doc("i").unwrap();
    let omega = m.cdga(doc.cdga.as_deref().unwrap()).unwrap();
    let (_, f) = m.filtration(doc.filtration.as_deref().unwrap()).unwrap();
    let i = m.cartan_homotopy("i").unwrap().clone();
    let images: Vec<_> = (0..i.source.dim()).map(|a| i.i(a)).collect();
    let (_, rep) = contraction_cartan(omega, &i.source, &images, Some(f)).unwrap();
    assert!(rep.all_hold(), "{name}: {rep:?}");
    i
}

#[test]
fn contractions_transport_zero_to_the_lie_derivative() {
    for name in ["jets", "elliptic", "torus"] {
        let i = contraction(name);
        let l = i.lie_from_cartan().unwrap();
        let hom = HomDgla::new(&i.source, &i.target, 4).unwrap();
        let ie = i.to_hom(&hom).unwrap();
        let transported = gauge_zero_transport(&hom, &ie).unwrap();
        let strict = hom.strict_embed(&l).unwrap();
        assert_eq!(transported, strict, "{name}");
        assert!(transported.is_strict());
        let back = transport_of_l(&hom, &ie, &l.map).unwrap();
        assert!(linalg::is_zero(&back), "{name}");
    }
}

#[test]
fn arity_two_component_matches_the_formula_on_jets() {
    let i = contraction("jets");
    let hom = HomDgla::new(&i.source, &i.target, 2).unwrap();
    let t = gauge_zero_transport(&hom, &i.to_hom(&hom).unwrap()).unwrap();
    for a in 0..i.source.dim() {
        for b in a..i.source.dim() {
            let predicted = predicted_arity_two(&hom, &i, a, b);
            let got = t.coefficient(2).get(&vec![a, b]).cloned().unwrap_or_else(|| linalg::zeros(i.target.dim()));
            assert_eq!(got, predicted, "({a}, {b})");
        }
    }
}
