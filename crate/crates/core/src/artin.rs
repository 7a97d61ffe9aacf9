//! Local Artin algebras (through their maximal ideal) and the nilpotent dglas `g ⊗ m_A`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::Complex;
use crate::dgla::{self, Dgla, DglaMorphism, SparseVec};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::linalg::{self, Vector};
use crate::report::{Check, ValidationReport};
use crate::scalar::Scalar;

/// The maximal ideal `m_A` of an ungraded local Artin algebra, with a monomial basis.
///
/// Each basis element carries a weight (its `m`-adic order), used by the
/// order-by-order solvers; products of weights `a`, `b` land in weight `>= a + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArtinAlgebra {
    labels: Vec<String>,
    weights: Vec<usize>,
    table: Vec<Vec<SparseVec>>,
    order: usize,
    generators: usize,
}

fn monomial_label(exps: &[usize]) -> String {
    if exps.len() == 1 {
        return if exps[0] == 1 { "eps".into() } else { format!("eps^{}", exps[0]) };
    }
    exps.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("eps{}", i + 1) } else { format!("eps{}^{}", i + 1, e) })
        .collect::<Vec<_>>()
        .join("*")
}

/// Exponent vectors with total degree `w`, lexicographically descending.
fn exponents(k: usize, w: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![w]];
    }
    (0..=w)
        .rev()
        .flat_map(|first| {
            exponents(k - 1, w - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

impl ArtinAlgebra {
    /// `m_A = (ε_1, …, ε_k)` in `K[ε_1..ε_k]/(ε_1..ε_k)^N`.
    pub fn truncated_polynomial(k: usize, n: usize) -> Result<Self> {
        if k == 0 || n < 2 || k > 8 || n > 16 {
            return Err(Error::OutOfRange(format!("truncated polynomial algebra ({k}, {n})")));
        }
        let monos: Vec<Vec<usize>> = (1..n).flat_map(|w| exponents(k, w)).collect();
        let pos: BTreeMap<&Vec<usize>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let table = monos
            .iter()
            .map(|a| {
                monos
                    .iter()
                    .map(|b| {
                        let c: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        pos.get(&c).map(|&i| vec![(i, crate::scalar::one())]).unwrap_or_default()
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            labels: monos.iter().map(|m| monomial_label(m)).collect(),
            weights: monos.iter().map(|m| m.iter().sum()).collect(),
            table,
            order: n,
            generators: k,
        })
    }

    /// Explicit multiplication table on a basis of `m_A`. `products[(a, b)]` may be given for
    /// either order; missing pairs are zero. Use [`ArtinAlgebra::validate`] to check the axioms.
    pub fn from_table(
        labels: Vec<String>,
        weights: Vec<usize>,
        products: &BTreeMap<(usize, usize), Vector>,
        order: usize,
        generators: usize,
    ) -> Result<Self> {
        let n = labels.len();
        if weights.len() != n {
            return Err(Error::Dimension("one weight per basis monomial".into()));
        }
        if weights.contains(&0) {
            return Err(Error::Structural("weights of m_A must be positive".into()));
        }
        let mut table = vec![vec![SparseVec::new(); n]; n];
        for (&(a, b), v) in products {
            if a >= n || b >= n || v.len() != n {
                return Err(Error::Dimension(format!("product entry ({a}, {b}) out of range")));
            }
            table[a][b] = dgla::sparse(v);
            if a != b && !products.contains_key(&(b, a)) {
                table[b][a] = dgla::sparse(v);
            }
        }
        Ok(Self { labels, weights, table, order, generators })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn weight(&self, i: usize) -> usize {
        self.weights[i]
    }

    pub fn max_weight(&self) -> usize {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn product(&self, a: usize, b: usize) -> &SparseVec {
        &self.table[a][b]
    }

    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = linalg::zeros(self.dim());
        for (a, p) in linalg::support(x) {
            for (b, q) in linalg::support(y) {
                for (c, r) in &self.table[a][b] {
                    out[*c] += p * q * r;
                }
            }
        }
        out
    }

    /// Associativity, commutativity and `m^N = 0`.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut report = ValidationReport::ok();
        let unit = |i| linalg::unit(n, i);
        let describe = |v: &[Scalar]| -> Vec<(String, String)> {
            linalg::support(v).map(|(i, x)| (self.labels[i].clone(), crate::scalar::format(x))).collect()
        };
        for a in 0..n {
            for b in 0..n {
                if self.table[a][b] != self.table[b][a] {
                    let r = linalg::sub(&dgla::dense(n, &self.table[a][b]), &dgla::dense(n, &self.table[b][a]));
                    report.push(
                        Check::Commutativity,
                        vec![self.labels[a].clone(), self.labels[b].clone()],
                        describe(&r),
                    );
                }
                let ab = dgla::dense(n, &self.table[a][b]);
                for c in 0..n {
                    let bc = dgla::dense(n, &self.table[b][c]);
                    let r = linalg::sub(&self.multiply(&ab, &unit(c)), &self.multiply(&unit(a), &bc));
                    if !linalg::is_zero(&r) {
                        let w = vec![self.labels[a].clone(), self.labels[b].clone(), self.labels[c].clone()];
                        report.push(Check::Associativity, w, describe(&r));
                    }
                }
            }
        }
        // Span of all products of `k` basis elements, k = 1..N.
        let mut power: Vec<Vector> = (0..n).map(unit).collect();
        for k in 2..=self.order {
            let next: Vec<Vector> = power
                .iter()
                .flat_map(|p| (0..n).map(move |b| (p, b)))
                .map(|(p, b)| self.multiply(p, &unit(b)))
                .filter(|v| !linalg::is_zero(v))
                .collect();
            power = linalg::span_basis(n, &next);
            if k == self.order {
                if let Some(v) = power.first() {
                    report.push(Check::Nilpotency, vec![format!("m^{}", self.order)], describe(v));
                }
            }
        }
        report
    }
}

/// `g ⊗ m_A` with basis `v|mono`, ordered by degree, then `g`-basis, then monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotentDgla {
    base: Dgla,
    algebra: ArtinAlgebra,
    dgla: Dgla,
}

pub fn tensor_nilpotent(g: &Dgla, a: &ArtinAlgebra) -> Result<NilpotentDgla> {
    let gs = g.space();
    let m = a.dim();
    let mut comps: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    for v in 0..gs.dim() {
        for mono in 0..m {
            comps.entry(gs.degree(v)).or_default().push(format!("{}|{}", gs.label(v), a.label(mono)));
        }
    }
    let space = GradedSpace::new(comps)?;
    let n = space.dim();
    let images: Vec<Vector> = (0..n)
        .map(|k| {
            let (v, mono) = (k / m, k % m);
            let dv = g.d(&gs.unit(v));
            let mut out = linalg::zeros(n);
            for (w, x) in linalg::support(&dv) {
                out[w * m + mono] = x.clone();
            }
            out
        })
        .collect();
    let d = GradedMap::from_images(space.clone(), space.clone(), 1, &images)?;
    let complex = Complex::new(space, d)?;
    let dgla = Dgla::from_upper(complex, |i, j| {
        let (v, p) = (i / m, i % m);
        let (w, q) = (j / m, j % m);
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        let prod = a.product(p, q);
        if prod.is_empty() {
            return SparseVec::new();
        }
        for (u, x) in g.basis_bracket(v, w) {
            for (r, y) in prod {
                *out.entry(u * m + r).or_insert_with(crate::scalar::zero) += x * y;
            }
        }
        out.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    });
    Ok(NilpotentDgla { base: g.clone(), algebra: a.clone(), dgla })
}

impl NilpotentDgla {
    pub fn dgla(&self) -> &Dgla {
        &self.dgla
    }

    pub fn base(&self) -> &Dgla {
        &self.base
    }

    pub fn algebra(&self) -> &ArtinAlgebra {
        &self.algebra
    }

    pub fn index(&self, v: usize, mono: usize) -> usize {
        v * self.algebra.dim() + mono
    }

    /// Weight of a basis element (the weight of its monomial).
    pub fn weight_of(&self, k: usize) -> usize {
        self.algebra.weight(k % self.algebra.dim())
    }

    /// `x ⊗ mono` for `x` in the base dgla.
    pub fn embed(&self, x: &[Scalar], mono: usize) -> Vector {
        let mut out = linalg::zeros(self.dgla.dim());
        for (v, c) in linalg::support(x) {
            out[self.index(v, mono)] = c.clone();
        }
        out
    }

    /// The base-dgla coefficient of `mono` in `x`.
    pub fn coefficient(&self, x: &[Scalar], mono: usize) -> Vector {
        (0..self.base.dim()).map(|v| x[self.index(v, mono)].clone()).collect()
    }

    /// Components of `x` of weight exactly `w`.
    pub fn weight_part(&self, x: &[Scalar], w: usize) -> Vector {
        x.iter().enumerate().map(|(k, c)| if self.weight_of(k) == w { c.clone() } else { Scalar::zero() }).collect()
    }

    /// Components of `x` of weight `< w`.
    pub fn truncate_below(&self, x: &[Scalar], w: usize) -> Vector {
        x.iter().enumerate().map(|(k, c)| if self.weight_of(k) < w { c.clone() } else { Scalar::zero() }).collect()
    }

    /// Smallest weight carrying a nonzero component.
    pub fn min_weight(&self, x: &[Scalar]) -> Option<usize> {
        linalg::support(x).map(|(k, _)| self.weight_of(k)).min()
    }

    pub fn monomials_of_weight(&self, w: usize) -> Vec<usize> {
        (0..self.algebra.dim()).filter(|&m| self.algebra.weight(m) == w).collect()
    }
}

/// The morphism `f ⊗ id: g ⊗ m_A -> h ⊗ m_A`.
pub fn tensor_morphism(f: &DglaMorphism, a: &ArtinAlgebra) -> Result<DglaMorphism> {
    let src = tensor_nilpotent(&f.source, a)?;
    let tgt = tensor_nilpotent(&f.target, a)?;
    let images: Vec<Vector> = (0..src.dgla().dim())
        .map(|k| {
            let (v, mono) = (k / a.dim(), k % a.dim());
            tgt.embed(&f.map.image(v), mono)
        })
        .collect();
    let map = GradedMap::from_images(src.dgla().space().clone(), tgt.dgla().space().clone(), 0, &images)?;
    DglaMorphism::new(src.dgla, tgt.dgla, map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn truncated_bases() {
        let a1 = ArtinAlgebra::truncated_polynomial(1, 2).unwrap();
        assert_eq!(a1.labels(), ["eps"]);
        let a2 = ArtinAlgebra::truncated_polynomial(1, 3).unwrap();
        assert_eq!(a2.labels(), ["eps", "eps^2"]);
        assert_eq!(a2.product(0, 0), &vec![(1, int(1))]);
        assert!(a2.product(0, 1).is_empty());
        let a3 = ArtinAlgebra::truncated_polynomial(2, 2).unwrap();
        assert_eq!(a3.labels(), ["eps1", "eps2"]);
        let b = ArtinAlgebra::truncated_polynomial(2, 3).unwrap();
        assert_eq!(b.labels(), ["eps1", "eps2", "eps1^2", "eps1*eps2", "eps2^2"]);
        for (k, n) in [(1, 2), (1, 5), (2, 3), (3, 3), (2, 4)] {
            let a = ArtinAlgebra::truncated_polynomial(k, n).unwrap();
            let binom = (1..=k).fold(1usize, |acc, i| acc * (n - 1 + i) / i);
            assert_eq!(a.dim(), binom - 1);
            assert!(a.validate().is_valid());
        }
        assert!(ArtinAlgebra::truncated_polynomial(0, 2).is_err());
        assert!(ArtinAlgebra::truncated_polynomial(1, 1).is_err());
    }

    #[test]
    fn idempotent_mutation_is_not_nilpotent() {
        let labels = vec!["eps".to_string(), "eps^2".to_string()];
        let products = BTreeMap::from([((0, 0), vec![int(1), int(0)])]);
        let a = ArtinAlgebra::from_table(labels, vec![1, 2], &products, 3, 1).unwrap();
        let r = a.validate();
        assert!(r.has(Check::Nilpotency));
    }
}
