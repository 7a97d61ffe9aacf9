//! Cartan homotopies `i: g -> h[-1]`, the associated morphism `l = d_{1,0} i`, and the
//! transport `e^{-i} * 0` in the convolution dgla.

use serde::Serialize;

use crate::convolution::{HomDgla, LinfMorphism};
use crate::dgla::{self, Dgla, DglaMorphism};
use crate::error::{Error, Result};
use crate::graded::GradedMap;
use crate::linalg::{self, Vector};
use crate::mc;
use crate::par::{self, Exec};
use crate::report::{describe, Check, ValidationReport};
use crate::scalar::{self, Scalar};

/// A degree-0 linear map `g -> h[-1]`, i.e. `i_a ∈ h^{|a|-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanHomotopy {
    pub source: Dgla,
    pub target: Dgla,
    pub map: GradedMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartanReport {
    /// Violations of conditions A and B.
    pub report: ValidationReport,
    /// `i_{[a,b]} = [i_a, l_b]` on all pairs.
    pub strong_bracket: bool,
    /// `[i_a, i_b] = 0` on all pairs.
    pub strong_commuting: bool,
}

impl CartanReport {
    pub fn is_cartan(&self) -> bool {
        self.report.is_valid()
    }
}

impl CartanHomotopy {
    pub fn new(source: Dgla, target: Dgla, map: GradedMap) -> Result<Self> {
        if map.source() != source.space() || map.target() != target.space() {
            return Err(Error::Dimension("map does not match (g, h)".into()));
        }
        if map.shift() != -1 {
            return Err(Error::WrongDegree { expected: -1, found: map.shift().to_string() });
        }
        Ok(Self { source, target, map })
    }

    pub fn zero(source: &Dgla, target: &Dgla) -> Self {
        let map = GradedMap::zero(source.space().clone(), target.space().clone(), -1);
        Self { source: source.clone(), target: target.clone(), map }
    }

    /// Recovers `i` from a Hom element of bidegree `(-1, 1)`.
    pub fn from_hom(hom: &HomDgla, i: &[Scalar]) -> Result<Self> {
        for (k, _) in linalg::support(i) {
            let b = hom.bidegree(k);
            if b != (-1, 1) {
                return Err(Error::WrongDegree { expected: 0, found: format!("bidegree {b:?}") });
            }
        }
        Self::new(hom.source().clone(), hom.target().clone(), hom.to_linear(i, -1)?)
    }

    pub fn to_hom(&self, hom: &HomDgla) -> Result<Vector> {
        hom.from_linear(&self.map)
    }

    pub fn i(&self, a: usize) -> Vector {
        self.map.image(a)
    }

    pub fn apply(&self, x: &[Scalar]) -> Vector {
        self.map.apply(x)
    }

    /// `l_a = d_h i_a + i_{d a}`.
    pub fn lie_map(&self) -> GradedMap {
        let g = &self.source;
        let images: Vec<Vector> = (0..g.dim())
            .map(|a| {
                let ia = self.i(a);
                linalg::add(&self.target.d(&ia), &self.apply(&g.d(&g.space().unit(a))))
            })
            .collect();
        GradedMap::from_images(g.space().clone(), self.target.space().clone(), 0, &images).expect("degree-0 images")
    }

    pub fn check(&self) -> CartanReport {
        self.check_with(Exec::default())
    }

    /// Conditions A: `i_{[a,b]} = ½([i_a, l_b] + ε(a,b) [i_b, l_a])` with `ε(a,b) = -(-1)^{|a||b|}`,
    /// and B: `[i_a, [i_b, l_c]] = 0`; plus the two stronger conditions.
    pub fn check_with(&self, exec: Exec) -> CartanReport {
        let g = &self.source;
        let h = &self.target;
        let gs = g.space();
        let n = g.dim();
        let l = self.lie_map();
        let is: Vec<Vector> = (0..n).map(|a| self.i(a)).collect();
        let ls: Vec<Vector> = (0..n).map(|a| l.image(a)).collect();
        let half = scalar::frac(1, 2);
        let pair_results = par::range_map(exec, n, |a| {
            let mut fails = Vec::new();
            let mut strong_b = true;
            let mut strong_c = true;
            for b in 0..n {
                let iab = self.apply(&dgla::dense(n, g.basis_bracket(a, b)));
                let eps = -dgla::koszul(gs.degree(a), gs.degree(b));
                let rhs = linalg::scale(
                    &half,
                    &linalg::add(&h.bracket(&is[a], &ls[b]), &linalg::scale(&eps, &h.bracket(&is[b], &ls[a]))),
                );
                let res = linalg::sub(&iab, &rhs);
                if !linalg::is_zero(&res) {
                    fails.push((
                        Check::CartanA,
                        vec![gs.label(a).to_string(), gs.label(b).to_string()],
                        describe(h.space(), &res),
                    ));
                }
                if iab != h.bracket(&is[a], &ls[b]) {
                    strong_b = false;
                }
                if !linalg::is_zero(&h.bracket(&is[a], &is[b])) {
                    strong_c = false;
                }
                for (c, lc) in ls.iter().enumerate() {
                    let res = h.bracket(&is[a], &h.bracket(&is[b], lc));
                    if !linalg::is_zero(&res) {
                        let w = vec![gs.label(a).to_string(), gs.label(b).to_string(), gs.label(c).to_string()];
                        fails.push((Check::CartanB, w, describe(h.space(), &res)));
                    }
                }
            }
            (fails, strong_b, strong_c)
        });
        let mut report = ValidationReport::ok();
        let mut strong_bracket = true;
        let mut strong_commuting = true;
        for (fails, sb, sc) in pair_results {
            for (c, w, r) in fails {
                report.push(c, w, r);
            }
            strong_bracket &= sb;
            strong_commuting &= sc;
        }
        CartanReport { report, strong_bracket, strong_commuting }
    }

    /// `l` as a dgla morphism; rejects non-Cartan `i` or an `l` failing validation.
    pub fn lie_from_cartan(&self) -> Result<DglaMorphism> {
        let rep = self.check();
        if !rep.is_cartan() {
            let f = &rep.report.failures[0];
            return Err(Error::Precondition(format!("not a Cartan homotopy: {:?} on {:?}", f.check, f.witness)));
        }
        let l = DglaMorphism::new(self.source.clone(), self.target.clone(), self.lie_map())?;
        let v = l.validate();
        if !v.is_valid() {
            return Err(Error::Structural(format!("l fails {:?}", v.failures[0].check)));
        }
        Ok(l)
    }
}

/// Taylor coefficients of `e^{-i} * 0 = Σ_n (ad_{-i})^n/(n+1)! D i` up to the arity bound.
pub fn gauge_zero_transport(hom: &HomDgla, i: &[Scalar]) -> Result<LinfMorphism> {
    let minus_i = linalg::neg(i);
    let zero = linalg::zeros(hom.dim());
    let x = mc::gauge_act(hom.dgla(), &minus_i, &zero)?;
    hom.extract_taylor(&x)
}

/// `e^{i} * l` for the strict element of `l`; zero for Cartan homotopies.
pub fn transport_of_l(hom: &HomDgla, i: &[Scalar], l: &GradedMap) -> Result<Vector> {
    let le = hom.strict_element(l)?;
    mc::gauge_act(hom.dgla(), i, &le)
}

/// Arity-2 value predicted for `e^{-i} * 0`: `d_{0,1} i - ½[i, l]`, evaluated directly on pairs
/// from the brackets of `g` and `h` (`d_{0,1} i (sa·sb) = -(-1)^{|a|} i_{[a,b]}`).
pub fn predicted_arity_two(hom: &HomDgla, cartan: &CartanHomotopy, a: usize, b: usize) -> Vector {
    let g = &cartan.source;
    let n = g.dim();
    let i_ab = cartan.apply(&dgla::dense(n, g.basis_bracket(a.min(b), a.max(b))));
    let (lo, hi) = (a.min(b), a.max(b));
    let lo_deg = g.space().degree(lo) as i64;
    let term1 = linalg::scale(&-scalar::sign(lo_deg), &i_ab);
    let i_el = cartan.to_hom(hom).expect("same spaces");
    let l_el = hom.from_linear(&cartan.lie_map()).expect("same spaces");
    let br = hom.bracket_on_pair(&i_el, &l_el, lo, hi);
    linalg::sub(&term1, &linalg::scale(&scalar::frac(1, 2), &br))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::graded::GradedSpace;

    #[test]
    fn zero_homotopy_transports_to_zero() {
        let s = GradedSpace::from_degrees(&[(0, &["a"][..]), (1, &["b"][..])]).unwrap();
        let g = Dgla::abelian(Complex::trivial(s));
        let i = CartanHomotopy::zero(&g, &g);
        let rep = i.check();
        assert!(rep.is_cartan() && rep.strong_bracket && rep.strong_commuting);
        let hom = HomDgla::new(&g, &g, 3).unwrap();
        let t = gauge_zero_transport(&hom, &i.to_hom(&hom).unwrap()).unwrap();
        assert_eq!(t, LinfMorphism::zero(3));
        assert!(i.lie_from_cartan().unwrap().map.is_zero());
    }

    #[test]
    fn wrong_degree_rejected() {
        let s = GradedSpace::from_degrees(&[(0, &["a"][..])]).unwrap();
        let g = Dgla::abelian(Complex::trivial(s.clone()));
        let id = GradedMap::identity(&s);
        assert!(matches!(CartanHomotopy::new(g.clone(), g, id), Err(Error::WrongDegree { .. })));
    }
}
