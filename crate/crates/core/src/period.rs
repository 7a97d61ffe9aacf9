//! Finite cdga models of a de Rham complex with a decreasing filtration, the flag pair
//! `End^{≥0}(Ω) ⊆ End(Ω)`, contraction as a Cartan homotopy, the end
//! `∫_p Hom^0(F^pH, H/F^pH)` and the period differential.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::artin::NilpotentDgla;
use crate::cartan::{CartanHomotopy, CartanReport};
use crate::complex::Cohomology;
use crate::complex::{Complex, Quotient};
use crate::dgla::{self, sub_quotient, Dgla, SubDgla};
use crate::endo::EndDgla;
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Homogeneity};
use crate::linalg::{self, Matrix, Vector};
use crate::mc::ObstructionClass;
use crate::report::{Check, ValidationReport};
use crate::scalar::{self, Scalar};

/// A complex with a graded-commutative product given on basis pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdgaModel {
    complex: Complex,
    /// Full table, `(i, j) -> e_i · e_j`.
    products: BTreeMap<(usize, usize), Vector>,
    /// Entries supplied in both orders, kept for the commutativity check.
    supplied: BTreeMap<(usize, usize), Vector>,
}

impl CdgaModel {
    /// Missing `(j, i)` entries are derived from `(i, j)` by graded commutativity;
    /// absent pairs multiply to zero.
    pub fn new(complex: Complex, table: BTreeMap<(usize, usize), Vector>) -> Result<Self> {
        let s = complex.space();
        let n = s.dim();
        for (&(i, j), v) in &table {
            if i >= n || j >= n || v.len() != n {
                return Err(Error::Dimension(format!("product entry ({i}, {j}) out of range")));
            }
            s.check_degree(v, s.degree(i) + s.degree(j))?;
        }
        let mut products = table.clone();
        for (&(i, j), v) in &table {
            if !table.contains_key(&(j, i)) {
                let sign = dgla::koszul(s.degree(i), s.degree(j));
                products.insert((j, i), linalg::scale(&sign, v));
            }
        }
        Ok(Self { complex, products, supplied: table })
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

    pub fn basis_product(&self, i: usize, j: usize) -> Vector {
        self.products.get(&(i, j)).cloned().unwrap_or_else(|| linalg::zeros(self.dim()))
    }

    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Vector {
        let mut out = linalg::zeros(self.dim());
        for (i, a) in linalg::support(x) {
            for (j, b) in linalg::support(y) {
                if let Some(v) = self.products.get(&(i, j)) {
                    linalg::axpy(&mut out, &(a * b), v);
                }
            }
        }
        out
    }

    /// Graded commutativity, associativity and the Leibniz rule on basis tuples.
    pub fn validate(&self) -> ValidationReport {
        let s = self.space();
        let n = self.dim();
        let mut report = ValidationReport::ok();
        for (&(i, j), v) in &self.supplied {
            if let Some(w) = self.supplied.get(&(j, i)) {
                let res = linalg::sub(v, &linalg::scale(&dgla::koszul(s.degree(i), s.degree(j)), w));
                if i < j && !linalg::is_zero(&res) {
                    report.push_vector(Check::Commutativity, vec![s.label(i).into(), s.label(j).into()], s, &res);
                }
            }
        }
        let unit = |k| s.unit(k);
        for a in 0..n {
            for b in 0..n {
                let ab = self.basis_product(a, b);
                for c in 0..n {
                    let res =
                        linalg::sub(&self.multiply(&ab, &unit(c)), &self.multiply(&unit(a), &self.basis_product(b, c)));
                    if !linalg::is_zero(&res) {
                        let w = vec![s.label(a).into(), s.label(b).into(), s.label(c).into()];
                        report.push_vector(Check::Associativity, w, s, &res);
                    }
                }
                let lhs = self.complex.d(&ab);
                let sign = scalar::sign(s.degree(a) as i64);
                let rhs = linalg::add(
                    &self.multiply(&self.complex.d(&unit(a)), &unit(b)),
                    &linalg::scale(&sign, &self.multiply(&unit(a), &self.complex.d(&unit(b)))),
                );
                let res = linalg::sub(&lhs, &rhs);
                if !linalg::is_zero(&res) {
                    report.push_vector(Check::Leibniz, vec![s.label(a).into(), s.label(b).into()], s, &res);
                }
            }
        }
        report
    }
}

/// A decreasing filtration given by spanning sets of `F^p` for `p` in a finite window;
/// below the window `F^p` is everything, above it zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationData {
    dim: usize,
    levels: BTreeMap<i32, Vec<Vector>>,
}

impl FiltrationData {
    pub fn new(dim: usize, levels: BTreeMap<i32, Vec<Vector>>) -> Result<Self> {
        for vs in levels.values() {
            if vs.iter().any(|v| v.len() != dim) {
                return Err(Error::Dimension("filtration vector has the wrong length".into()));
            }
        }
        if let (Some(lo), Some(hi)) = (levels.keys().next(), levels.keys().next_back()) {
            if (hi - lo + 1) as usize != levels.len() {
                return Err(Error::Structural("filtration levels must be consecutive".into()));
            }
        }
        let levels = levels.into_iter().map(|(p, vs)| (p, linalg::span_basis(dim, &vs))).collect();
        Ok(Self { dim, levels })
    }

    /// `F^p = ⊕_{deg ≥ p}` style filtration from a per-basis-vector weight.
    pub fn from_weights(weights: &[i32]) -> Self {
        let dim = weights.len();
        let (Some(&lo), Some(&hi)) = (weights.iter().min(), weights.iter().max()) else {
            return Self { dim, levels: BTreeMap::new() };
        };
        let levels = (lo..=hi)
            .map(|p| {
                let basis = (0..dim).filter(|&k| weights[k] >= p).map(|k| linalg::unit(dim, k)).collect();
                (p, basis)
            })
            .collect();
        Self { dim, levels }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(lowest, highest)` listed level.
    pub fn window(&self) -> Option<(i32, i32)> {
        Some((*self.levels.keys().next()?, *self.levels.keys().next_back()?))
    }

    pub fn level(&self, p: i32) -> Vec<Vector> {
        match self.window() {
            None => Vec::new(),
            Some((lo, _)) if p < lo => (0..self.dim).map(|k| linalg::unit(self.dim, k)).collect(),
            Some((_, hi)) if p > hi => Vec::new(),
            Some(_) => self.levels[&p].clone(),
        }
    }

    pub fn contains(&self, p: i32, v: &[Scalar]) -> bool {
        linalg::in_span(self.dim, &self.level(p), v)
    }

    /// Decreasing, graded, and (given a complex) d-stable.
    pub fn validate(&self, space: &GradedSpace, complex: Option<&Complex>) -> ValidationReport {
        let mut report = ValidationReport::ok();
        let Some((lo, hi)) = self.window() else { return report };
        for p in lo..=hi + 1 {
            let fp = self.level(p);
            for v in &self.level(p + 1) {
                if !linalg::in_span(self.dim, &fp, v) {
                    report.push_vector(
                        Check::Filtration,
                        vec![format!("F^{}", p + 1), "not decreasing".into()],
                        space,
                        v,
                    );
                }
            }
            for v in &fp {
                for deg in space.degrees() {
                    let part = space.project(v, deg);
                    if !linalg::in_span(self.dim, &fp, &part) {
                        report.push_vector(Check::Filtration, vec![format!("F^{p}"), "not graded".into()], space, v);
                    }
                }
                if let Some(c) = complex {
                    let dv = c.d(v);
                    if !linalg::in_span(self.dim, &fp, &dv) {
                        report.push_vector(
                            Check::Filtration,
                            vec![format!("F^{p}"), "not d-stable".into()],
                            space,
                            &dv,
                        );
                    }
                }
            }
        }
        report
    }

    /// The induced filtration on `H`, in the coordinates of `cohomology.as_space()`.
    pub fn on_cohomology(&self, complex: &Complex, cohomology: &Cohomology) -> Result<Self> {
        let s = complex.space();
        let hs = cohomology.as_space();
        let Some((lo, hi)) = self.window() else { return Ok(Self { dim: hs.dim(), levels: BTreeMap::new() }) };
        let mut levels = BTreeMap::new();
        for p in lo..=hi {
            let fp = self.level(p);
            let mut classes = Vec::new();
            for deg in s.degrees() {
                if cohomology.rank(deg) == 0 {
                    continue;
                }
                // cocycles inside F^p of this degree
                let local: Vec<Vector> = fp.iter().map(|v| s.project(v, deg)).filter(|v| !linalg::is_zero(v)).collect();
                let basis = linalg::span_basis(self.dim, &local);
                if basis.is_empty() {
                    continue;
                }
                let dm = Matrix::from_columns(self.dim, &basis.iter().map(|v| complex.d(v)).collect::<Vec<_>>());
                for coeffs in dm.nullspace() {
                    let mut z = linalg::zeros(self.dim);
                    for (v, c) in basis.iter().zip(&coeffs) {
                        linalg::axpy(&mut z, c, v);
                    }
                    let class = cohomology.class_of(deg, &z)?;
                    classes.push(hs.embed(deg, &class));
                }
            }
            levels.insert(p, classes);
        }
        Self::new(hs.dim(), levels)
    }
}

pub fn build_end_dgla(omega: &CdgaModel) -> Result<EndDgla> {
    EndDgla::new(omega.complex())
}

/// Endomorphisms `φ` with `φ(F^p) ⊆ F^p` for all `p`.
pub fn filtered_subdgla(end: &EndDgla, filtration: &FiltrationData) -> Result<SubDgla> {
    let base = end.base();
    let rep = filtration.validate(base.space(), Some(base));
    if !rep.is_valid() {
        let f = &rep.failures[0];
        return Err(Error::Precondition(format!("filtration check failed: {}", f.witness.join(" "))));
    }
    let n = base.dim();
    let es = end.dgla().space();
    let mut constraints: Vec<(Vector, Vector)> = Vec::new();
    if let Some((lo, hi)) = filtration.window() {
        for p in lo..=hi {
            let fp = filtration.level(p);
            let ann = if fp.is_empty() {
                (0..n).map(|k| linalg::unit(n, k)).collect()
            } else {
                Matrix::from_columns(n, &fp).transpose().nullspace()
            };
            for v in &fp {
                for w in &ann {
                    constraints.push((v.clone(), w.clone()));
                }
            }
        }
    }
    let mut spans = Vec::new();
    for deg in es.degrees() {
        let range = es.range(deg).expect("listed degree");
        let mut m = Matrix::zeros(constraints.len(), range.len());
        for (col, k) in range.clone().enumerate() {
            let op = es.unit(k);
            for (r, (v, w)) in constraints.iter().enumerate() {
                let image = end.act(&op, v);
                m[(r, col)] = image.iter().zip(w).map(|(a, b)| a * b).sum();
            }
        }
        for v in m.nullspace() {
            spans.push(es.embed(deg, &v));
        }
    }
    SubDgla::new(end.dgla().clone(), &spans)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractionReport {
    pub cartan: CartanReport,
    /// `l_a = d∘i_a - (-1)^{|i_a|} i_a∘d + i_{da}` computed by composing operators.
    pub defining_equation: bool,
    /// `l_{[a,b]} = [l_a, l_b]`
    pub lie_bracket: bool,
    /// `[d, l_a] = l_{da}`
    pub lie_chain: bool,
    /// `l_a` preserves the filtration; `None` without one.
    pub preserves_filtration: Option<bool>,
}

impl ContractionReport {
    pub fn all_hold(&self) -> bool {
        self.cartan.is_cartan()
            && self.defining_equation
            && self.lie_bracket
            && self.lie_chain
            && self.preserves_filtration != Some(false)
    }
}

/// `i_a`, given as End elements, must be derivations of degree `|a| - 1` of the product.
pub fn contraction_cartan(
    omega: &CdgaModel,
    g: &Dgla,
    images: &[Vector],
    filtration: Option<&FiltrationData>,
) -> Result<(CartanHomotopy, ContractionReport)> {
    let end = build_end_dgla(omega)?;
    let h = end.dgla();
    if images.len() != g.dim() {
        return Err(Error::Dimension(format!("expected {} contraction images", g.dim())));
    }
    let os = omega.space();
    for (a, op) in images.iter().enumerate() {
        let k = g.space().degree(a) - 1;
        if op.len() != h.dim() {
            return Err(Error::Dimension(format!("image of {} has the wrong length", g.space().label(a))));
        }
        match h.space().homogeneity(op) {
            Homogeneity::Zero => continue,
            Homogeneity::Degree(d) if d == k => {}
            _ => return Err(Error::WrongDegree { expected: k, found: g.space().label(a).to_string() }),
        }
        for x in 0..omega.dim() {
            for y in 0..omega.dim() {
                let lhs = end.act(op, &omega.basis_product(x, y));
                let sign = scalar::sign((k * os.degree(x)) as i64);
                let rhs = linalg::add(
                    &omega.multiply(&end.act(op, &os.unit(x)), &os.unit(y)),
                    &linalg::scale(&sign, &omega.multiply(&os.unit(x), &end.act(op, &os.unit(y)))),
                );
                if lhs != rhs {
                    return Err(Error::Precondition(format!(
                        "i({}) is not a derivation on ({}, {})",
                        g.space().label(a),
                        os.label(x),
                        os.label(y)
                    )));
                }
            }
        }
    }
    let map = GradedMap::from_images(g.space().clone(), h.space().clone(), -1, images)?;
    let cartan = CartanHomotopy::new(g.clone(), h.clone(), map)?;
    let report = cartan.check();
    let l = cartan.lie_map();
    let n = g.dim();
    let ls: Vec<Vector> = (0..n).map(|a| l.image(a)).collect();
    let dmat = omega.complex().differential().to_dense();
    let defining_equation = (0..n).all(|a| {
        let i = end.to_matrix(&images[a]);
        let sign = scalar::sign((g.space().degree(a) - 1) as i64);
        let di = dmat.mul(&i).add(&i.mul(&dmat).scaled(&-sign));
        let ida = end.to_matrix(&cartan.apply(&g.d(&g.space().unit(a))));
        di.add(&ida) == end.to_matrix(&ls[a])
    });
    let lie_bracket =
        (0..n).all(|a| (0..n).all(|b| l.apply(&dgla::dense(n, g.basis_bracket(a, b))) == h.bracket(&ls[a], &ls[b])));
    let lie_chain = (0..n).all(|a| h.d(&ls[a]) == l.apply(&g.d(&g.space().unit(a))));
    let preserves_filtration = match filtration {
        None => None,
        Some(f) => {
            let sub = filtered_subdgla(&end, f)?;
            Some(ls.iter().all(|v| sub.contains(v)))
        }
    };
    Ok((cartan, ContractionReport { cartan: report, defining_equation, lie_bracket, lie_chain, preserves_filtration }))
}

/// One level of the flag diagram: a basis of `F^pH` and the quotient `H/F^pH`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct FlagLevel {
    p: i32,
    sub: Vec<Vector>,
    quotient: Quotient,
    /// Unknown slots `(row in quotient, column in sub)` allowed by degree.
    slots: Vec<(usize, usize)>,
}

/// `∫_p Hom^0(F^pH, H/F^pH)`: families `(φ_p)` with `φ_p|F^{p+1} = π∘φ_{p+1}`, where
/// `π: H/F^{p+1} → H/F^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndSpace {
    space: GradedSpace,
    levels: Vec<FlagLevel>,
    offsets: Vec<usize>,
    unknowns: usize,
    /// Basis of compatible families, each as a vector of slot values.
    basis: Vec<Vector>,
}

/// A family `(φ_p)`, each `φ_p` as a matrix from `F^pH` (chosen basis) to `H/F^pH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub maps: BTreeMap<i32, Matrix>,
}

fn sub_basis_by_degree(space: &GradedSpace, spans: &[Vector]) -> Vec<Vector> {
    let dim = space.dim();
    let mut out = Vec::new();
    for deg in space.degrees() {
        let parts: Vec<Vector> = spans.iter().map(|v| space.project(v, deg)).collect();
        out.extend(linalg::span_basis(dim, &parts));
    }
    out
}

pub fn end_of_flag_diagram(space: &GradedSpace, filtration: &FiltrationData) -> Result<EndSpace> {
    let rep = filtration.validate(space, None);
    if !rep.is_valid() {
        return Err(Error::Precondition(format!("filtration check failed: {}", rep.failures[0].witness.join(" "))));
    }
    let dim = space.dim();
    let trivial = Complex::trivial(space.clone());
    let mut levels = Vec::new();
    if let Some((lo, hi)) = filtration.window() {
        for p in lo..=hi {
            let sub = sub_basis_by_degree(space, &filtration.level(p));
            let quotient = trivial.quotient(&sub)?;
            let qs = quotient.complex.space();
            let mut slots = Vec::new();
            for (c, v) in sub.iter().enumerate() {
                let Homogeneity::Degree(d) = space.homogeneity(v) else { unreachable!("graded basis") };
                for r in qs.range(d).into_iter().flatten() {
                    slots.push((r, c));
                }
            }
            levels.push(FlagLevel { p, sub, quotient, slots });
        }
    }
    let mut offsets = Vec::new();
    let mut unknowns = 0;
    for l in &levels {
        offsets.push(unknowns);
        unknowns += l.slots.len();
    }
    // compatibility rows: for each consecutive pair and each basis vector of F^{p+1}
    let mut rows: Vec<Vector> = Vec::new();
    for k in 0..levels.len().saturating_sub(1) {
        let (lp, lq) = (&levels[k], &levels[k + 1]);
        let qdim_p = lp.quotient.complex.dim();
        for (cq, v) in lq.sub.iter().enumerate() {
            let coords = linalg::coordinates(dim, &lp.sub, v).expect("decreasing filtration");
            // φ_p(v) - π(φ_{p+1}(v)), one row per coordinate of H/F^p
            for r in 0..qdim_p {
                let mut row = linalg::zeros(unknowns);
                for (s, &(sr, sc)) in lp.slots.iter().enumerate() {
                    if sr == r {
                        row[offsets[k] + s] += coords[sc].clone();
                    }
                }
                for (s, &(sr, sc)) in lq.slots.iter().enumerate() {
                    if sc == cq {
                        let lifted = lq.quotient.lift.image(sr);
                        let down = lp.quotient.projection.apply(&lifted);
                        row[offsets[k + 1] + s] -= down[r].clone();
                    }
                }
                if !linalg::is_zero(&row) {
                    rows.push(row);
                }
            }
        }
    }
    let basis = if unknowns == 0 {
        Vec::new()
    } else if rows.is_empty() {
        (0..unknowns).map(|k| linalg::unit(unknowns, k)).collect()
    } else {
        let m = Matrix::from_rows(rows.len(), unknowns, rows.concat());
        m.nullspace()
    };
    Ok(EndSpace { space: space.clone(), levels, offsets, unknowns, basis })
}

impl EndSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn to_family(&self, v: &[Scalar]) -> Family {
        let mut maps = BTreeMap::new();
        for (k, l) in self.levels.iter().enumerate() {
            let mut m = Matrix::zeros(l.quotient.complex.dim(), l.sub.len());
            for (s, &(r, c)) in l.slots.iter().enumerate() {
                m[(r, c)] = v[self.offsets[k] + s].clone();
            }
            maps.insert(l.p, m);
        }
        Family { maps }
    }

    fn to_slots(&self, f: &Family) -> Option<Vector> {
        let mut v = linalg::zeros(self.unknowns);
        for (k, l) in self.levels.iter().enumerate() {
            let m = f.maps.get(&l.p)?;
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    match l.slots.iter().position(|&s| s == (r, c)) {
                        Some(s) => v[self.offsets[k] + s] = m[(r, c)].clone(),
                        None if m[(r, c)] == scalar::zero() => {}
                        None => return None,
                    }
                }
            }
        }
        Some(v)
    }

    pub fn basis(&self) -> Vec<Family> {
        self.basis.iter().map(|v| self.to_family(v)).collect()
    }

    /// The family `φ_p = φ|F^p mod F^p` of a degree-0 endomorphism of `H`.
    pub fn family_of(&self, phi: &Matrix) -> Family {
        let mut maps = BTreeMap::new();
        for l in &self.levels {
            let cols: Vec<Vector> = l.sub.iter().map(|v| l.quotient.projection.apply(&phi.apply(v))).collect();
            maps.insert(l.p, Matrix::from_columns(l.quotient.complex.dim(), &cols));
        }
        Family { maps }
    }

    /// Coordinates in the basis of compatible families, `None` off the end.
    pub fn coordinates(&self, f: &Family) -> Option<Vector> {
        let v = self.to_slots(f)?;
        linalg::coordinates(self.unknowns, &self.basis, &v)
    }

    /// `(p, "source -> target")` entries of a family, labels from `H`.
    pub fn describe(&self, f: &Family) -> Vec<(i32, String)> {
        let mut out = Vec::new();
        for l in &self.levels {
            let m = &f.maps[&l.p];
            let qs = l.quotient.complex.space();
            for c in 0..m.cols() {
                let terms: Vec<String> = (0..m.rows())
                    .filter(|&r| m[(r, c)] != scalar::zero())
                    .map(|r| format!("{}*{}", scalar::format(&m[(r, c)]), qs.label(r)))
                    .collect();
                if !terms.is_empty() {
                    let src = self.space.describe(&l.sub[c]);
                    let src: Vec<String> = src.iter().map(|(lab, x)| format!("{}*{lab}", scalar::format(x))).collect();
                    out.push((l.p, format!("{} -> {}", src.join("+"), terms.join("+"))));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodDifferential {
    pub h1_dim: usize,
    pub end_dim: usize,
    /// Columns: images of the `H^1(g)` representatives in the end basis.
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
    /// Every image satisfies the compatibility equations.
    pub in_end: bool,
    pub isomorphism: bool,
    /// Images as labelled families, one list per `H^1` representative.
    pub families: Vec<Vec<(i32, String)>>,
}

/// `H^1(i)` followed by the action on `H = H(Ω)`; requires `d_Ω = 0` so that `H = Ω`.
pub fn period_differential(
    omega: &CdgaModel,
    cartan: &CartanHomotopy,
    filtration: &FiltrationData,
) -> Result<PeriodDifferential> {
    if !omega.complex().differential().is_zero() {
        return Err(Error::Unsupported("period differential needs a model with zero differential".into()));
    }
    let end = build_end_dgla(omega)?;
    if cartan.target != *end.dgla() {
        return Err(Error::HostMismatch);
    }
    let g = &cartan.source;
    let es = end_of_flag_diagram(omega.space(), filtration)?;
    let reps = g.complex().cohomology().representatives(1);
    let mut columns = Vec::new();
    let mut families = Vec::new();
    let mut in_end = true;
    for a in &reps {
        let phi = end.to_matrix(&cartan.apply(a));
        let fam = es.family_of(&phi);
        families.push(es.describe(&fam));
        match es.coordinates(&fam) {
            Some(c) => columns.push(c),
            None => {
                in_end = false;
                columns.push(linalg::zeros(es.dim()));
            }
        }
    }
    let m = Matrix::from_columns(es.dim(), &columns);
    let rank = m.rank();
    let matrix = columns.iter().map(|c| c.iter().map(scalar::format).collect()).collect();
    Ok(PeriodDifferential {
        h1_dim: reps.len(),
        end_dim: es.dim(),
        matrix,
        rank,
        in_end,
        isomorphism: in_end && rank == reps.len() && rank == es.dim(),
        families,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionImage {
    pub order: usize,
    /// `(monomial, H^1(h/n) coordinates)`
    pub classes: Vec<(String, Vec<String>)>,
    pub is_zero: bool,
}

/// `H^2(i)` of an obstruction class, landing in `H^1(h/n)`.
pub fn obstruction_image(
    cartan: &CartanHomotopy,
    n: &SubDgla,
    host: &NilpotentDgla,
    h2: &Cohomology,
    obstruction: &ObstructionClass,
) -> Result<ObstructionImage> {
    if n.parent() != &cartan.target || host.base() != &cartan.source {
        return Err(Error::HostMismatch);
    }
    let (_, quotient) = sub_quotient(n)?;
    let hq = quotient.complex.cohomology();
    let reps = h2.representatives(2);
    let mut classes = Vec::new();
    let mut is_zero = true;
    for (mono, coords) in &obstruction.classes {
        let mut cocycle = linalg::zeros(cartan.source.dim());
        for (r, c) in reps.iter().zip(coords) {
            linalg::axpy(&mut cocycle, c, r);
        }
        let image = quotient.projection.apply(&cartan.apply(&cocycle));
        let class = hq.class_of(1, &image)?;
        is_zero &= linalg::is_zero(&class);
        classes.push((host.algebra().label(*mono).to_string(), class.iter().map(scalar::format).collect()));
    }
    Ok(ObstructionImage { order: obstruction.order, classes, is_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin::{tensor_nilpotent, ArtinAlgebra};
    use crate::mc::{mc_extend_order, Extension};

    fn table(dim: usize, entries: &[(usize, usize, usize, i64)]) -> BTreeMap<(usize, usize), Vector> {
        let mut t: BTreeMap<(usize, usize), Vector> = BTreeMap::new();
        for &(i, j, k, c) in entries {
            let e = t.entry((i, j)).or_insert_with(|| linalg::zeros(dim));
            e[k] += scalar::int(c);
        }
        t
    }

    /// `Λ(ξ, ξ̄)` with zero differential.
    fn torus() -> CdgaModel {
        let s = GradedSpace::from_degrees(&[(0, &["1"][..]), (1, &["xi", "xib"][..]), (2, &["xi*xib"][..])]).unwrap();
        let t = table(4, &[(0, 0, 0, 1), (0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1), (1, 2, 3, 1)]);
        CdgaModel::new(Complex::trivial(s), t).unwrap()
    }

    /// By ξ-degree.
    fn hodge(omega: &CdgaModel) -> FiltrationData {
        let f = FiltrationData::from_weights(&[0, 1, 0, 1]);
        assert!(f.validate(omega.space(), Some(omega.complex())).is_valid());
        f
    }

    fn torus_family() -> (Dgla, Vec<Vector>) {
        let omega = torus();
        let end = build_end_dgla(&omega).unwrap();
        let g = Dgla::abelian(Complex::trivial(
            GradedSpace::from_degrees(&[(0, &["D"][..]), (1, &["D*xib"][..])]).unwrap(),
        ));
        let u = |k| linalg::unit(4, k);
        let z = linalg::zeros(4);
        // ι_∂: ξ ↦ 1, ξξ̄ ↦ ξ̄;  ξ̄ ∧ ι_∂: ξ ↦ ξ̄
        let contraction = end.from_images(&[z.clone(), u(0), z.clone(), u(2)]).unwrap();
        let twisted = end.from_images(&[z.clone(), u(2), z.clone(), z]).unwrap();
        (g, vec![contraction, twisted])
    }

    /// `K[x]/(x³) ⊕ K[x]/(x²) dx`.
    fn jets() -> CdgaModel {
        let s = GradedSpace::from_degrees(&[(0, &["1", "x", "x2"][..]), (1, &["dx", "xdx"][..])]).unwrap();
        let mut dm = Matrix::zeros(2, 3);
        dm[(0, 1)] = scalar::one();
        dm[(1, 2)] = scalar::int(2);
        let d = GradedMap::new(s.clone(), s.clone(), 1, BTreeMap::from([(0, dm)])).unwrap();
        let mut entries: Vec<(usize, usize, usize, i64)> = (0..5).map(|k| (0, k, k, 1)).collect();
        entries.extend([(1, 1, 2, 1), (1, 3, 4, 1)]);
        CdgaModel::new(Complex::new(s, d).unwrap(), table(5, &entries)).unwrap()
    }

    fn jet_fields() -> (Dgla, Vec<Vector>) {
        let omega = jets();
        let end = build_end_dgla(&omega).unwrap();
        let s = GradedSpace::from_degrees(&[(0, &["x*D", "x2*D"][..])]).unwrap();
        let g =
            Dgla::new(Complex::trivial(s), BTreeMap::from([((0, 1), vec![scalar::zero(), scalar::one()])])).unwrap();
        let u = |k| linalg::unit(5, k);
        let z = linalg::zeros(5);
        // i_{f∂}(h dx) = f h
        let ix = end.from_images(&[z.clone(), z.clone(), z.clone(), u(1), u(2)]).unwrap();
        let ix2 = end.from_images(&[z.clone(), z.clone(), z.clone(), u(2), z]).unwrap();
        (g, vec![ix, ix2])
    }

    #[test]
    fn models_are_cdgas() {
        assert!(torus().validate().is_valid());
        assert!(jets().validate().is_valid());
        let mut t = table(4, &[(0, 0, 0, 1), (0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1), (1, 2, 3, 1)]);
        t.insert((2, 1), linalg::unit(4, 3));
        let bad = CdgaModel::new(torus().complex().clone(), t).unwrap();
        assert!(bad.validate().has(Check::Commutativity));
    }

    #[test]
    fn filtration_preserving_operators() {
        let omega = torus();
        let end = build_end_dgla(&omega).unwrap();
        let f = hodge(&omega);
        let sub = filtered_subdgla(&end, &f).unwrap();
        assert!(sub.dim() < end.dgla().dim());
        let (_, ops) = torus_family();
        assert!(!sub.contains(&ops[1]));
        let trivial =
            FiltrationData::new(4, BTreeMap::from([(0, (0..4).map(|k| linalg::unit(4, k)).collect())])).unwrap();
        assert_eq!(filtered_subdgla(&end, &trivial).unwrap().dim(), end.dgla().dim());
    }

    #[test]
    fn non_stable_filtration_is_rejected() {
        let omega = jets();
        let end = build_end_dgla(&omega).unwrap();
        // F^1 = ⟨x⟩ is not d-stable
        let f = FiltrationData::new(5, BTreeMap::from([(1, vec![linalg::unit(5, 1)])])).unwrap();
        assert!(matches!(filtered_subdgla(&end, &f), Err(Error::Precondition(_))));
    }

    #[test]
    fn jet_contraction_satisfies_the_cartan_identities() {
        let omega = jets();
        let (g, ops) = jet_fields();
        let f = FiltrationData::from_weights(&[0, 0, 0, 1, 1]);
        let (cartan, rep) = contraction_cartan(&omega, &g, &ops, Some(&f)).unwrap();
        assert!(rep.all_hold(), "{rep:?}");
        assert!(rep.cartan.strong_bracket && rep.cartan.strong_commuting);
        // l_{x∂}(x) = x, l_{x∂}(dx) = dx
        let end = build_end_dgla(&omega).unwrap();
        let l = end.to_matrix(&cartan.lie_map().image(0));
        assert_eq!(l.apply(&linalg::unit(5, 1)), linalg::unit(5, 1));
        assert_eq!(l.apply(&linalg::unit(5, 3)), linalg::unit(5, 3));
    }

    #[test]
    fn non_derivation_is_rejected() {
        let omega = jets();
        let (g, mut ops) = jet_fields();
        let end = build_end_dgla(&omega).unwrap();
        let z = linalg::zeros(5);
        ops[1] = end.from_images(&[z.clone(), z.clone(), z.clone(), linalg::unit(5, 0), z]).unwrap();
        assert!(matches!(contraction_cartan(&omega, &g, &ops, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn torus_period_differential_is_an_isomorphism() {
        let omega = torus();
        let (g, ops) = torus_family();
        let f = hodge(&omega);
        let (cartan, rep) = contraction_cartan(&omega, &g, &ops, Some(&f)).unwrap();
        assert!(rep.all_hold());
        assert!(cartan.lie_map().is_zero());
        let pd = period_differential(&omega, &cartan, &f).unwrap();
        assert!(pd.isomorphism && pd.in_end, "{pd:?}");
        assert_eq!((pd.h1_dim, pd.end_dim), (1, 1));
        assert_eq!(pd.families, vec![vec![(1, "1*xi -> 1*xib".to_string())]]);
        let zero = CartanHomotopy::zero(&g, &cartan.target);
        assert_eq!(period_differential(&omega, &zero, &f).unwrap().rank, 0);
    }

    #[test]
    fn end_of_degenerate_flags_is_zero() {
        let s = torus().space().clone();
        let all = FiltrationData::new(4, BTreeMap::from([(0, (0..4).map(|k| linalg::unit(4, k)).collect())])).unwrap();
        assert_eq!(end_of_flag_diagram(&s, &all).unwrap().dim(), 0);
        let none = FiltrationData::new(4, BTreeMap::from([(1, Vec::new())])).unwrap();
        assert_eq!(end_of_flag_diagram(&s, &none).unwrap().dim(), 0);
    }

    #[test]
    fn zero_homotopy_has_zero_obstruction_image() {
        let s = GradedSpace::from_degrees(&[(1, &["x"][..]), (2, &["y"][..])]).unwrap();
        let g =
            Dgla::new(Complex::trivial(s), BTreeMap::from([((0, 0), vec![scalar::zero(), scalar::one()])])).unwrap();
        let a = ArtinAlgebra::truncated_polynomial(1, 3).unwrap();
        let host = tensor_nilpotent(&g, &a).unwrap();
        let h2 = g.complex().cohomology();
        let eps = a.find("eps").unwrap();
        let partial = host.embed(&g.space().unit(0), eps);
        let Extension::Obstructed(ob) = mc_extend_order(&host, &h2, &partial, 2).unwrap() else { panic!() };
        let omega = torus();
        let end = build_end_dgla(&omega).unwrap();
        let n = filtered_subdgla(&end, &hodge(&omega)).unwrap();
        let i = CartanHomotopy::zero(&g, end.dgla());
        let img = obstruction_image(&i, &n, &host, &h2, &ob).unwrap();
        assert!(img.is_zero);
        assert_eq!(img.order, 2);
    }
}
