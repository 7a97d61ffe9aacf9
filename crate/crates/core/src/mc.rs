//! Maurer-Cartan elements, the gauge action, irrelevant stabilizers, order-by-order
//! extension with obstruction classes, gauge equivalence and `π_1` at the origin.

use num_traits::Zero;
use serde::Serialize;

use crate::artin::{tensor_nilpotent, ArtinAlgebra, NilpotentDgla};
use crate::complex::Cohomology;
use crate::dgla::Dgla;
use crate::error::{Error, Result};
use crate::graded::Homogeneity;
use crate::linalg::{self, Vector};
use crate::path::PathElement;
use crate::scalar::{self, Scalar};

fn expect_degree(g: &Dgla, v: &[Scalar], deg: i32) -> Result<()> {
    if v.len() != g.dim() {
        return Err(Error::HostMismatch);
    }
    g.space().check_degree(v, deg)
}

/// `dx + ½[x,x]` for `x` of degree 1.
pub fn mc_residue(g: &Dgla, x: &[Scalar]) -> Result<Vector> {
    expect_degree(g, x, 1)?;
    Ok(mc_residue_unchecked(g, x))
}

fn mc_residue_unchecked(g: &Dgla, x: &[Scalar]) -> Vector {
    let half = scalar::frac(1, 2);
    let mut r = g.d(x);
    linalg::axpy(&mut r, &half, &g.bracket(x, x));
    r
}

pub fn is_mc(g: &Dgla, x: &[Scalar]) -> Result<bool> {
    Ok(linalg::is_zero(&mc_residue(g, x)?))
}

/// Terms `(ad_α)^n/(n+1)! ([α,x] - dα)` for `n = 0, 1, …` until the first zero term.
fn gauge_terms(g: &Dgla, alpha: &[Scalar], x: &[Scalar]) -> Result<Vec<Vector>> {
    let mut term = linalg::sub(&g.bracket(alpha, x), &g.d(alpha));
    let mut terms = Vec::new();
    let mut n = 0usize;
    while !linalg::is_zero(&term) {
        if n > g.dim() + 2 {
            return Err(Error::NotNilpotent);
        }
        n += 1;
        let next = g.bracket(alpha, &term);
        terms.push(linalg::scale(&scalar::factorial(n).recip(), &term));
        term = next;
    }
    Ok(terms)
}

/// `e^α * x = x + Σ_{n≥0} (ad_α)^n/(n+1)! ([α,x] - dα)`, summed exactly.
///
/// Fails with [`Error::NotNilpotent`] if the series does not terminate.
pub fn gauge_act(g: &Dgla, alpha: &[Scalar], x: &[Scalar]) -> Result<Vector> {
    expect_degree(g, alpha, 0)?;
    expect_degree(g, x, 1)?;
    let mut out = x.to_vec();
    for t in gauge_terms(g, alpha, x)? {
        out = linalg::add(&out, &t);
    }
    Ok(out)
}

/// Spanning set `{dh + [x,h]}` over the degree -1 basis, reduced to a basis.
pub fn irrelevant_stabilizer(g: &Dgla, x: &[Scalar]) -> Result<Vec<Vector>> {
    expect_degree(g, x, 1)?;
    let s = g.space();
    let gens: Vec<Vector> = s
        .range(-1)
        .map(|r| r.map(|k| linalg::add(&g.d(&s.unit(k)), &g.bracket(x, &s.unit(k)))).collect())
        .unwrap_or_default();
    Ok(linalg::span_basis(g.dim(), &gens))
}

/// `p(t) = e^{tα} * x` with `q(t) = -α`, an MC element of `g ⊗ K[t, dt]`.
pub fn gauge_path(g: &Dgla, alpha: &[Scalar], x: &[Scalar]) -> Result<PathElement> {
    expect_degree(g, alpha, 0)?;
    expect_degree(g, x, 1)?;
    // (ad_{tα})^n ([tα,x] - d(tα)) = t^{n+1} (ad_α)^n (...)
    let mut p = vec![x.to_vec()];
    p.extend(gauge_terms(g, alpha, x)?);
    Ok(PathElement::new(g.dim(), p, vec![linalg::neg(alpha)]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionComponent {
    /// Monomial of `m_A`.
    pub monomial: String,
    /// Coordinates in the chosen representatives of `H^2(g)`.
    pub class: Vec<String>,
}

/// Nonzero obstruction to lifting an MC solution from order `j - 1` to order `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionClass {
    pub order: usize,
    /// `(monomial index, H^2 coordinates)` for every monomial of weight `order`.
    pub classes: Vec<(usize, Vector)>,
    /// Order-`order` part of `dx + ½[x,x]`.
    pub residual: Vector,
}

impl ObstructionClass {
    pub fn is_zero(&self) -> bool {
        self.classes.iter().all(|(_, c)| linalg::is_zero(c))
    }

    /// The class as a cocycle of `g ⊗ m_A`, in the chosen representatives.
    pub fn cocycle(&self, host: &NilpotentDgla, h2: &Cohomology) -> Vector {
        let reps = h2.representatives(2);
        let mut out = linalg::zeros(host.dgla().dim());
        for (mono, c) in &self.classes {
            for (r, x) in reps.iter().zip(c) {
                out = linalg::add(&out, &host.embed(&linalg::scale(x, r), *mono));
            }
        }
        out
    }

    pub fn components(&self, host: &NilpotentDgla) -> Vec<ObstructionComponent> {
        self.classes
            .iter()
            .map(|(m, c)| ObstructionComponent {
                monomial: host.algebra().label(*m).to_string(),
                class: c.iter().map(scalar::format).collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    /// MC solution modulo `m^{j+1}` extending the input.
    Lifted(Vector),
    Obstructed(ObstructionClass),
}

/// Lifts `partial`, an MC solution modulo `m^j` with no components of weight `>= j`, to
/// order `j`. The correction `x_μ` for each weight-`j` monomial `μ` is the solution of
/// `d x_μ = -R_μ` with free coordinates zero.
pub fn mc_extend_order(host: &NilpotentDgla, h2: &Cohomology, partial: &[Scalar], j: usize) -> Result<Extension> {
    let g = host.dgla();
    expect_degree(g, partial, 1)?;
    if j == 0 {
        return Err(Error::OutOfRange("orders start at 1".into()));
    }
    if let Some(w) = linalg::support(partial).map(|(k, _)| host.weight_of(k)).filter(|&w| w >= j).min() {
        return Err(Error::Precondition(format!("partial solution has a component of order {w} >= {j}")));
    }
    let residual = mc_residue_unchecked(g, partial);
    if let Some(w) = host.min_weight(&residual).filter(|&w| w < j) {
        return Err(Error::Precondition(format!("partial solution fails the MC equation at order {w}")));
    }
    let rj = host.weight_part(&residual, j);
    let base = host.base();
    let mut classes = Vec::new();
    let mut correction = linalg::zeros(g.dim());
    let mut obstructed = false;
    for mono in host.monomials_of_weight(j) {
        let r = host.coefficient(&rj, mono);
        let class = h2.class_of(2, &r)?;
        if !linalg::is_zero(&class) {
            obstructed = true;
        } else if !obstructed {
            let x = base
                .complex()
                .solve_coboundary(2, &linalg::neg(&r))
                .ok_or_else(|| Error::Structural("exact residual without a primitive".into()))?;
            correction = linalg::add(&correction, &host.embed(&x, mono));
        }
        classes.push((mono, class));
    }
    if obstructed {
        return Ok(Extension::Obstructed(ObstructionClass { order: j, classes, residual: rj }));
    }
    Ok(Extension::Lifted(linalg::add(partial, &correction)))
}

/// Outcome of running [`mc_extend_order`] through all orders of a truncated algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionRun {
    /// Solution after the last successful order.
    pub solution: Vector,
    /// Orders lifted with zero obstruction.
    pub lifted: Vec<usize>,
    pub obstruction: Option<ObstructionClass>,
}

/// Extends a first-order solution through every order `2..=max_weight`.
pub fn extend_all(host: &NilpotentDgla, h2: &Cohomology, first_order: &[Scalar]) -> Result<ExtensionRun> {
    let mut x = first_order.to_vec();
    let top = host.algebra().max_weight();
    let max_given = linalg::support(first_order).map(|(k, _)| host.weight_of(k)).max().unwrap_or(0);
    let mut lifted = Vec::new();
    for j in (max_given + 1).max(2)..=top {
        match mc_extend_order(host, h2, &x, j)? {
            Extension::Lifted(y) => {
                x = y;
                lifted.push(j);
            }
            Extension::Obstructed(o) => return Ok(ExtensionRun { solution: x, lifted, obstruction: Some(o) }),
        }
    }
    Ok(ExtensionRun { solution: x, lifted, obstruction: None })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaugeDecision {
    Equivalent {
        witness: Vector,
    },
    /// Certified inequivalence: the weight-`order` discrepancy is not a coboundary and every
    /// earlier choice of gauge was forced.
    NotEquivalent {
        order: usize,
        discrepancy: Vector,
        reason: &'static str,
    },
    Inconclusive {
        order: usize,
        reason: &'static str,
    },
}

/// Staged solver over the `m_A`-adic filtration: at each order `j`, choose `α_j` with
/// `dα_j = -(y - e^{α_{<j}} * x)_j`.
pub fn gauge_equivalent(host: &NilpotentDgla, x: &[Scalar], y: &[Scalar]) -> Result<GaugeDecision> {
    let g = host.dgla();
    for v in [x, y] {
        if !linalg::is_zero(&mc_residue(g, v)?) {
            return Err(Error::Precondition("inputs must be Maurer-Cartan".into()));
        }
    }
    let base = host.base();
    let affine = affine_action(base);
    let z0 = cocycle_dim(base, 0);
    let mut alpha = linalg::zeros(g.dim());
    let mut forced = true;
    for j in 1..=host.algebra().max_weight() {
        let z = gauge_act(g, &alpha, x)?;
        let r = host.weight_part(&linalg::sub(y, &z), j);
        let mut ok = true;
        let mut step = linalg::zeros(g.dim());
        for mono in host.monomials_of_weight(j) {
            let rm = host.coefficient(&r, mono);
            match base.complex().solve_coboundary(1, &linalg::neg(&rm)) {
                Some(a) => step = linalg::add(&step, &host.embed(&a, mono)),
                None => ok = false,
            }
        }
        if !ok {
            if j == 1 {
                return Ok(GaugeDecision::NotEquivalent {
                    order: j,
                    discrepancy: r,
                    reason: "first-order classes differ",
                });
            }
            if affine {
                return Ok(GaugeDecision::NotEquivalent { order: j, discrepancy: r, reason: "affine action" });
            }
            if forced {
                return Ok(GaugeDecision::NotEquivalent { order: j, discrepancy: r, reason: "gauge forced below" });
            }
            return Ok(GaugeDecision::Inconclusive { order: j, reason: "lower-order gauge freedom" });
        }
        if z0 > 0 && !host.monomials_of_weight(j).is_empty() {
            forced = false;
        }
        alpha = linalg::add(&alpha, &step);
    }
    if linalg::sub(&gauge_act(g, &alpha, x)?, y).iter().all(Zero::is_zero) {
        Ok(GaugeDecision::Equivalent { witness: alpha })
    } else {
        Ok(GaugeDecision::Inconclusive { order: host.algebra().max_weight(), reason: "staged solution failed" })
    }
}

/// Whether `[g^0, g^1] = 0`, so that `e^α * x = x - dα`.
fn affine_action(g: &Dgla) -> bool {
    let s = g.space();
    let (Some(r0), Some(r1)) = (s.range(0), s.range(1)) else { return true };
    r0.clone().all(|a| r1.clone().all(|b| g.basis_bracket(a, b).is_empty()))
}

fn cocycle_dim(g: &Dgla, deg: i32) -> usize {
    g.complex().cohomology().degree(deg).map_or(0, |d| d.cocycle_dim)
}

/// `exp(h^0 ⊗ m_A)` presented through its Lie algebra with the truncated BCH product.
#[derive(Debug, Clone)]
pub struct GaugeGroup {
    host: NilpotentDgla,
    /// Basis of `h^0 ⊗ m_A` (global vectors of the host).
    pub lie_basis: Vec<Vector>,
    /// Longest bracket word that can be nonzero.
    pub bch_length: usize,
    pub stabilizer_at_zero: Vec<Vector>,
}

impl GaugeGroup {
    pub fn host(&self) -> &NilpotentDgla {
        &self.host
    }

    pub fn dim(&self) -> usize {
        self.lie_basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.lie_basis.is_empty()
    }

    /// Whether the BCH product is just addition.
    pub fn is_abelian(&self) -> bool {
        let g = self.host.dgla();
        self.lie_basis.iter().all(|a| self.lie_basis.iter().all(|b| linalg::is_zero(&g.bracket(a, b))))
    }

    /// `log(e^a e^b)` by the Dynkin series.
    pub fn product(&self, a: &[Scalar], b: &[Scalar]) -> Vector {
        bch(self.host.dgla(), a, b, self.bch_length)
    }

    pub fn inverse(&self, a: &[Scalar]) -> Vector {
        linalg::neg(a)
    }
}

/// Requires `d = 0`; returns the group with the check that the irrelevant stabilizer of 0 vanishes.
pub fn pi1_at_zero(h: &Dgla, a: &ArtinAlgebra) -> Result<GaugeGroup> {
    if !h.has_zero_differential() {
        return Err(Error::Unsupported("π1 at zero is only presented for trivial differential".into()));
    }
    let host = tensor_nilpotent(h, a)?;
    let g = host.dgla();
    let s = g.space();
    let lie_basis = s.range(0).map(|r| r.map(|k| s.unit(k)).collect()).unwrap_or_default();
    let stabilizer_at_zero = irrelevant_stabilizer(g, &s.zero_vector())?;
    let bch_length = a.order().saturating_sub(1).max(1);
    Ok(GaugeGroup { host, lie_basis, bch_length, stabilizer_at_zero })
}

/// Baker-Campbell-Hausdorff via Dynkin's formula, truncated at word length `max_len`.
///
/// `log(e^X e^Y) = Σ_n (-1)^{n-1}/n Σ_{(r_i,s_i)} [X^{r_1} Y^{s_1} … X^{r_n} Y^{s_n}]
///                 / ((Σ r_i + s_i) Π r_i! s_i!)`
/// with `r_i + s_i > 0` and the bracket word right-nested.
pub fn bch(g: &Dgla, x: &[Scalar], y: &[Scalar], max_len: usize) -> Vector {
    let mut out = linalg::zeros(g.dim());
    for n in 1..=max_len {
        let coeff_n = scalar::sign(n as i64 - 1) / scalar::int(n as i64);
        for blocks in compositions(n, max_len) {
            let len: usize = blocks.iter().map(|(r, s)| r + s).sum();
            let mut denom = scalar::int(len as i64);
            let mut word: Vec<bool> = Vec::with_capacity(len);
            for (r, s) in &blocks {
                denom *= scalar::factorial(*r) * scalar::factorial(*s);
                word.extend(std::iter::repeat_n(true, *r));
                word.extend(std::iter::repeat_n(false, *s));
            }
            // [w_1, [w_2, … [w_{k-1}, w_k]]]
            let pick = |b: bool| if b { x } else { y };
            let mut acc = pick(word[len - 1]).to_vec();
            for &b in word[..len - 1].iter().rev() {
                acc = g.bracket(pick(b), &acc);
                if linalg::is_zero(&acc) {
                    break;
                }
            }
            if !linalg::is_zero(&acc) {
                out = linalg::add(&out, &linalg::scale(&(&coeff_n / denom), &acc));
            }
        }
    }
    out
}

/// Sequences of `n` pairs `(r_i, s_i)` with `r_i + s_i >= 1` and total length `<= budget`.
fn compositions(n: usize, budget: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for total in 1..=budget.saturating_sub(n - 1) {
        for rest in compositions(n - 1, budget - total) {
            for r in 0..=total {
                let mut v = vec![(r, total - r)];
                v.extend(rest.iter().copied());
                out.push(v);
            }
        }
    }
    out
}

/// Degree-1 homogeneity of a proposed MC element.
pub fn is_degree_one(g: &Dgla, x: &[Scalar]) -> bool {
    matches!(g.space().homogeneity(x), Homogeneity::Zero | Homogeneity::Degree(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::graded::GradedSpace;
    use std::collections::BTreeMap;

    fn f7() -> Dgla {
        let s = GradedSpace::from_degrees(&[(1, &["x"][..]), (2, &["y"][..])]).unwrap();
        let c = Complex::trivial(s);
        Dgla::new(c, BTreeMap::from([((0, 0), vec![scalar::zero(), scalar::one()])])).unwrap()
    }

    #[test]
    fn f7_residue_and_obstruction() {
        let a2 = ArtinAlgebra::truncated_polynomial(1, 3).unwrap();
        let host = tensor_nilpotent(&f7(), &a2).unwrap();
        let g = host.dgla();
        let x = host.embed(&[scalar::one(), scalar::zero()], 0);
        let r = mc_residue(g, &x).unwrap();
        assert_eq!(r, host.embed(&[scalar::zero(), scalar::frac(1, 2)], 1));
        let h2 = host.base().complex().cohomology();
        match mc_extend_order(&host, &h2, &x, 2).unwrap() {
            Extension::Obstructed(o) => {
                assert_eq!(o.order, 2);
                assert_eq!(o.classes, vec![(1, vec![scalar::frac(1, 2)])]);
            }
            other => panic!("expected obstruction, got {other:?}"),
        }
        let too_high = host.embed(&[scalar::one(), scalar::zero()], 1);
        assert!(matches!(mc_extend_order(&host, &h2, &too_high, 2), Err(Error::Precondition(_))));
    }

    #[test]
    fn bch_low_order() {
        // Heisenberg-like: [x,y] = z central, all in degree 0.
        let s = GradedSpace::from_degrees(&[(0, &["x", "y", "z"][..])]).unwrap();
        let c = Complex::trivial(s.clone());
        let g = Dgla::new(c, BTreeMap::from([((0, 1), s.unit(2))])).unwrap();
        let (x, y) = (s.unit(0), s.unit(1));
        let p = bch(&g, &x, &y, 4);
        let expect = vec![scalar::one(), scalar::one(), scalar::frac(1, 2)];
        assert_eq!(p, expect);
        assert_eq!(compositions(1, 3).len(), 2 + 3 + 4);
    }
}
