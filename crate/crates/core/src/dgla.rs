//! Differential graded Lie algebras given by structure constants.
//!
//! Brackets are supplied only for basis pairs `(i, j)` with `i <= j` in the global
//! (degree-sorted) order; the opposite pairs follow from graded antisymmetry
//! `[b, a] = -(-1)^{|a||b|} [a, b]`. Diagonal entries are kept verbatim, so a
//! nonzero `[a, a]` with `|a|` even shows up as an antisymmetry failure.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::{Complex, Quotient};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Homogeneity};
use crate::linalg::{self, Vector};
use crate::par::{self, Exec};
use crate::report::{describe, Check, ValidationReport};
use crate::scalar::{self, Scalar};

pub type SparseVec = Vec<(usize, Scalar)>;

pub fn sparse(v: &[Scalar]) -> SparseVec {
    linalg::support(v).map(|(i, x)| (i, x.clone())).collect()
}

pub fn dense(n: usize, s: &SparseVec) -> Vector {
    let mut v = linalg::zeros(n);
    for (i, x) in s {
        v[*i] += x;
    }
    v
}

fn parity(d: i32) -> i64 {
    d.rem_euclid(2) as i64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dgla {
    complex: Complex,
    table: Vec<Vec<SparseVec>>,
}

impl Dgla {
    /// Builds a dgla from `[e_i, e_j]` for `i <= j`. Pairs with `i > j` are rewritten
    /// through antisymmetry; supplying both orders of a pair is an error.
    pub fn new(complex: Complex, brackets: BTreeMap<(usize, usize), Vector>) -> Result<Self> {
        let space = complex.space().clone();
        let n = space.dim();
        let mut upper: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for ((i, j), v) in brackets {
            if i >= n || j >= n || v.len() != n {
                return Err(Error::Dimension(format!("bracket entry ({i}, {j}) out of range")));
            }
            let expect = space.degree(i) + space.degree(j);
            match space.homogeneity(&v) {
                Homogeneity::Zero => continue,
                Homogeneity::Degree(d) if d == expect => {}
                _ => {
                    return Err(Error::Structural(format!(
                        "[{}, {}] must have degree {expect}",
                        space.label(i),
                        space.label(j)
                    )))
                }
            }
            let (key, val) = if i <= j {
                ((i, j), v)
            } else {
                let s = -scalar::sign(parity(space.degree(i)) * parity(space.degree(j)));
                ((j, i), linalg::scale(&s, &v))
            };
            if upper.insert(key, val).is_some() {
                return Err(Error::Structural(format!(
                    "bracket of ({}, {}) given twice",
                    space.label(key.0),
                    space.label(key.1)
                )));
            }
        }
        Ok(Self::from_upper(complex, |i, j| upper.get(&(i, j)).map(|v| sparse(v)).unwrap_or_default()))
    }

    /// Builds the full table from a function evaluated on pairs `i <= j` only.
    pub fn from_upper<F>(complex: Complex, f: F) -> Self
    where
        F: Fn(usize, usize) -> SparseVec + Sync + Send,
    {
        let space = complex.space().clone();
        let n = space.dim();
        let rows: Vec<Vec<SparseVec>> = par::range_map(Exec::default(), n, |i| (i..n).map(|j| f(i, j)).collect());
        let mut table = vec![vec![SparseVec::new(); n]; n];
        for (i, row) in rows.into_iter().enumerate() {
            for (k, entry) in row.into_iter().enumerate() {
                let j = i + k;
                if j != i && !entry.is_empty() {
                    let s = -scalar::sign(parity(space.degree(i)) * parity(space.degree(j)));
                    table[j][i] = entry.iter().map(|(a, x)| (*a, &s * x)).collect();
                }
                table[i][j] = entry;
            }
        }
        Self { complex, table }
    }

    /// Dgla with zero bracket.
    pub fn abelian(complex: Complex) -> Self {
        let n = complex.dim();
        Self { complex, table: vec![vec![SparseVec::new(); n]; n] }
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn space(&self) -> &GradedSpace {
        self.complex.space()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn d(&self, v: &[Scalar]) -> Vector {
        self.complex.d(v)
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|r| r.iter().all(Vec::is_empty))
    }

    pub fn has_zero_differential(&self) -> bool {
        self.complex.differential().is_zero()
    }

    pub fn basis_bracket(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i][j]
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let n = self.dim();
        let mut out = linalg::zeros(n);
        let ys: SparseVec = sparse(y);
        if ys.is_empty() {
            return out;
        }
        for (i, a) in linalg::support(x) {
            let row = &self.table[i];
            for (j, b) in &ys {
                let entry = &row[*j];
                if entry.is_empty() {
                    continue;
                }
                let ab = a * b;
                for (k, c) in entry {
                    out[*k] += &ab * c;
                }
            }
        }
        out
    }

    /// `ad_x^k (y)`.
    pub fn ad_power(&self, x: &[Scalar], y: &[Scalar], k: usize) -> Vector {
        (0..k).fold(y.to_vec(), |acc, _| self.bracket(x, &acc))
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(Exec::default())
    }

    /// Checks antisymmetry on the diagonal, the Leibniz rule on all pairs and the
    /// Jacobi identity on all sorted triples. Off-diagonal antisymmetry holds by construction.
    pub fn validate_with(&self, exec: Exec) -> ValidationReport {
        let space = self.space();
        let n = self.dim();
        let mut report = ValidationReport::ok();
        for a in 0..n {
            let da = parity(space.degree(a));
            if da == 0 && !self.table[a][a].is_empty() {
                report.push(
                    Check::Antisymmetry,
                    vec![space.label(a).into(), space.label(a).into()],
                    sparse_desc(space, &self.table[a][a]),
                );
            }
        }
        let leibniz = par::range_flat_map(exec, n, |a| {
            let mut out = Vec::new();
            let ea = space.unit(a);
            let dea = self.d(&ea);
            for b in 0..n {
                let eb = space.unit(b);
                let lhs = self.d(&self.bracket(&ea, &eb));
                let r1 = self.bracket(&dea, &eb);
                let r2 = self.bracket(&ea, &self.d(&eb));
                let s = scalar::sign(parity(space.degree(a)));
                let rhs = linalg::add(&r1, &linalg::scale(&s, &r2));
                let res = linalg::sub(&lhs, &rhs);
                if !linalg::is_zero(&res) {
                    out.push((vec![space.label(a).to_string(), space.label(b).to_string()], describe(space, &res)));
                }
            }
            out
        });
        for (w, r) in leibniz {
            report.push(Check::Leibniz, w, r);
        }
        let degs = space.degrees();
        let jacobi = par::range_flat_map(exec, n, |a| {
            let mut out = Vec::new();
            for b in a..n {
                for c in b..n {
                    let (x, y, z) = (space.degree(a), space.degree(b), space.degree(c));
                    if !degs.contains(&(x + y + z)) {
                        continue;
                    }
                    let res = self.jacobi_residual(a, b, c);
                    if !linalg::is_zero(&res) {
                        let w =
                            vec![space.label(a).to_string(), space.label(b).to_string(), space.label(c).to_string()];
                        out.push((w, describe(space, &res)));
                    }
                }
            }
            out
        });
        for (w, r) in jacobi {
            report.push(Check::Jacobi, w, r);
        }
        report
    }

    /// `[a,[b,c]] - [[a,b],c] - (-1)^{|a||b|} [b,[a,c]]` on basis vectors.
    pub fn jacobi_residual(&self, a: usize, b: usize, c: usize) -> Vector {
        let n = self.dim();
        let space = self.space();
        let ea = space.unit(a);
        let eb = space.unit(b);
        let ec = space.unit(c);
        let bc = dense(n, &self.table[b][c]);
        let ab = dense(n, &self.table[a][b]);
        let ac = dense(n, &self.table[a][c]);
        let t1 = self.bracket(&ea, &bc);
        let t2 = self.bracket(&ab, &ec);
        let t3 = self.bracket(&eb, &ac);
        let s = scalar::sign(parity(space.degree(a)) * parity(space.degree(b)));
        linalg::sub(&linalg::sub(&t1, &t2), &linalg::scale(&s, &t3))
    }

    /// Same dgla with the basis reordered: new basis vector `k` is old basis vector `perm[k]`
    /// (the permutation must keep degrees grouped, i.e. only act within degrees).
    pub fn permuted(&self, perm: &[usize]) -> Result<Dgla> {
        let space = self.space();
        let n = self.dim();
        if perm.len() != n {
            return Err(Error::Dimension("permutation length".into()));
        }
        let mut comps: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for &old in perm {
            comps.entry(space.degree(old)).or_default().push(space.label(old).to_string());
        }
        let new_space = GradedSpace::new(comps)?;
        let pos: Vec<usize> =
            (0..n).map(|old| new_space.index(space.degree(old), space.label(old)).expect("label kept")).collect();
        let move_vec = |v: &[Scalar]| {
            let mut w = linalg::zeros(n);
            for (old, x) in v.iter().enumerate() {
                w[pos[old]] = x.clone();
            }
            w
        };
        let images: Vec<Vector> = (0..n)
            .map(|new| {
                let old = (0..n).find(|&o| pos[o] == new).expect("bijection");
                move_vec(&self.d(&space.unit(old)))
            })
            .collect();
        let d = GradedMap::from_images(new_space.clone(), new_space.clone(), 1, &images)?;
        let complex = Complex::new(new_space, d)?;
        let inv: Vec<usize> = (0..n).map(|new| (0..n).find(|&o| pos[o] == new).expect("bijection")).collect();
        Ok(Dgla::from_upper(complex, |i, j| sparse(&move_vec(&dense(n, &self.table[inv[i]][inv[j]])))))
    }
}

fn sparse_desc(space: &GradedSpace, s: &SparseVec) -> Vec<(String, String)> {
    s.iter().map(|(i, x)| (space.label(*i).to_string(), scalar::format(x))).collect()
}

/// Degree-0 map between dglas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DglaMorphism {
    pub source: Dgla,
    pub target: Dgla,
    pub map: GradedMap,
}

impl DglaMorphism {
    pub fn new(source: Dgla, target: Dgla, map: GradedMap) -> Result<Self> {
        if map.source() != source.space() || map.target() != target.space() {
            return Err(Error::Dimension("morphism does not match source/target spaces".into()));
        }
        if map.shift() != 0 {
            return Err(Error::Structural("dgla morphisms have degree 0".into()));
        }
        Ok(Self { source, target, map })
    }

    pub fn identity(g: &Dgla) -> Self {
        Self { source: g.clone(), target: g.clone(), map: GradedMap::identity(g.space()) }
    }

    pub fn zero(source: &Dgla, target: &Dgla) -> Self {
        let map = GradedMap::zero(source.space().clone(), target.space().clone(), 0);
        Self { source: source.clone(), target: target.clone(), map }
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        self.map.apply(v)
    }

    /// Chain-map and bracket-compatibility failures on basis vectors and sorted pairs.
    pub fn validate(&self) -> ValidationReport {
        let s = self.source.space();
        let t = self.target.space();
        let mut report = ValidationReport::ok();
        let images: Vec<Vector> = (0..s.dim()).map(|a| self.map.image(a)).collect();
        for (a, image) in images.iter().enumerate() {
            let lhs = self.map.apply(&self.source.d(&s.unit(a)));
            let rhs = self.target.d(image);
            let res = linalg::sub(&lhs, &rhs);
            if !linalg::is_zero(&res) {
                report.push_vector(Check::ChainMap, vec![s.label(a).into()], t, &res);
            }
        }
        let defects = par::range_flat_map(Exec::default(), s.dim(), |a| {
            (a..s.dim())
                .filter_map(|b| {
                    let res = self.bracket_defect(a, b, &images);
                    (!linalg::is_zero(&res))
                        .then(|| (vec![s.label(a).to_string(), s.label(b).to_string()], describe(t, &res)))
                })
                .collect()
        });
        for (w, r) in defects {
            report.push(Check::BracketCompatibility, w, r);
        }
        report
    }

    /// `f[a,b] - [fa, fb]` for basis vectors `a`, `b`.
    fn bracket_defect(&self, a: usize, b: usize, images: &[Vector]) -> Vector {
        let n = self.source.dim();
        let ab = dense(n, self.source.basis_bracket(a, b));
        linalg::sub(&self.map.apply(&ab), &self.target.bracket(&images[a], &images[b]))
    }

    /// `f[a,b] - [fa, fb]` on arbitrary elements.
    pub fn defect(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let lhs = self.map.apply(&self.source.bracket(x, y));
        linalg::sub(&lhs, &self.target.bracket(&self.map.apply(x), &self.map.apply(y)))
    }
}

/// A sub-dgla given by homogeneous spanning vectors of the parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubDgla {
    parent: Dgla,
    basis: Vec<Vector>,
}

impl SubDgla {
    /// Reduces `spans` to a degree-wise basis and checks closure under d and bracket.
    pub fn new(parent: Dgla, spans: &[Vector]) -> Result<Self> {
        let n = parent.dim();
        let mut by_degree: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
        for v in spans {
            if v.len() != n {
                return Err(Error::Dimension("spanning vector has the wrong length".into()));
            }
            match parent.space().homogeneity(v) {
                Homogeneity::Zero => {}
                Homogeneity::Degree(d) => by_degree.entry(d).or_default().push(v.clone()),
                Homogeneity::Mixed => return Err(Error::Structural("spanning vector is not homogeneous".into())),
            }
        }
        let basis: Vec<Vector> = by_degree.values().flat_map(|vs| linalg::span_basis(n, vs)).collect();
        let sub = Self { parent, basis };
        let report = sub.closure_report();
        if let Some(f) = report.failures.first() {
            return Err(Error::NotClosed {
                degree: sub.witness_degree(&f.witness),
                detail: format!("{:?} fails for {:?}", f.check, f.witness),
            });
        }
        Ok(sub)
    }

    pub fn zero(parent: Dgla) -> Self {
        Self { parent, basis: Vec::new() }
    }

    pub fn whole(parent: Dgla) -> Self {
        let basis = (0..parent.dim()).map(|i| parent.space().unit(i)).collect();
        Self { parent, basis }
    }

    fn witness_degree(&self, witness: &[String]) -> i32 {
        witness
            .first()
            .and_then(|w| w.strip_prefix("n#"))
            .and_then(|k| k.parse::<usize>().ok())
            .and_then(|k| self.basis.get(k))
            .and_then(|v| match self.parent.space().homogeneity(v) {
                Homogeneity::Degree(d) => Some(d),
                _ => None,
            })
            .unwrap_or(0)
    }

    pub fn parent(&self) -> &Dgla {
        &self.parent
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        linalg::in_span(self.parent.dim(), &self.basis, v)
    }

    /// Closure failures; witnesses name spanning vectors as `n#k`.
    pub fn closure_report(&self) -> ValidationReport {
        let mut report = ValidationReport::ok();
        let space = self.parent.space();
        for (k, v) in self.basis.iter().enumerate() {
            let dv = self.parent.d(v);
            if !self.contains(&dv) {
                report.push_vector(Check::Closure, vec![format!("n#{k}"), "d".into()], space, &dv);
            }
        }
        for a in 0..self.basis.len() {
            for b in a..self.basis.len() {
                let br = self.parent.bracket(&self.basis[a], &self.basis[b]);
                if !self.contains(&br) {
                    report.push_vector(Check::Closure, vec![format!("n#{a}"), format!("n#{b}")], space, &br);
                }
            }
        }
        report
    }

    /// The sub-dgla as a dgla in its own right, basis `n#k`, with its inclusion.
    pub fn as_dgla(&self) -> Result<(Dgla, DglaMorphism)> {
        let space = self.parent.space();
        let n = self.parent.dim();
        let mut comps: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for (k, v) in self.basis.iter().enumerate() {
            let Homogeneity::Degree(d) = space.homogeneity(v) else {
                unreachable!("basis vectors are homogeneous and nonzero")
            };
            comps.entry(d).or_default().push(format!("n#{k}"));
        }
        let sub_space = GradedSpace::new(comps)?;
        // basis order in sub_space matches self.basis since basis is degree-sorted
        let coords = |v: &[Scalar]| -> Vector { linalg::coordinates(n, &self.basis, v).expect("closed sub-dgla") };
        let d_images: Vec<Vector> = self.basis.iter().map(|v| coords(&self.parent.d(v))).collect();
        let d = GradedMap::from_images(sub_space.clone(), sub_space.clone(), 1, &d_images)?;
        let complex = Complex::new(sub_space.clone(), d)?;
        let dgla =
            Dgla::from_upper(complex, |i, j| sparse(&coords(&self.parent.bracket(&self.basis[i], &self.basis[j]))));
        let incl = GradedMap::from_images(sub_space, space.clone(), 0, &self.basis)?;
        let morphism = DglaMorphism::new(dgla.clone(), self.parent.clone(), incl)?;
        Ok((dgla, morphism))
    }
}

/// Closure report of `n` in `h` together with the quotient complex `h/n`.
pub fn sub_quotient(n: &SubDgla) -> Result<(ValidationReport, Quotient)> {
    let report = n.closure_report();
    if !report.is_valid() {
        return Err(Error::NotClosed { degree: 0, detail: format!("{:?}", report.failures[0]) });
    }
    let q = n.parent().complex().quotient(n.basis())?;
    Ok((report, q))
}

/// Convenience: the scalar `(-1)^{|a||b|}` for degrees.
pub fn koszul(a: i32, b: i32) -> Scalar {
    scalar::sign(parity(a) * parity(b))
}

pub fn is_zero_sparse(s: &SparseVec) -> bool {
    s.iter().all(|(_, x)| x.is_zero())
}
