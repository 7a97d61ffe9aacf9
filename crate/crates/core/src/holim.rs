//! The homotopy limit of `n ⇉ h` (inclusion and zero) as pairs `(x, γ)` with
//! `γ(0) = x ∈ n` and `γ(1) = 0`, its projection to `(h/n)[-1]`, the map `(l, e^i)` into
//! it, and the quasi-abelianity witness for formal pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cartan::CartanHomotopy;
use crate::complex::{self, Complex, Quotient, SubComplex};
use crate::convolution::HomDgla;
use crate::dgla::{sub_quotient, Dgla, SubDgla};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Homogeneity};
use crate::linalg::{self, Matrix, Vector};
use crate::mc;
use crate::path::PathElement;
use crate::report::{Check, ValidationReport};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolimElement {
    pub x: Vector,
    pub path: PathElement,
}

impl HolimElement {
    /// The element determined by its path (`x = γ(0)`).
    pub fn from_path(path: PathElement) -> Self {
        Self { x: path.at_zero(), path }
    }

    pub fn d(&self, h: &Dgla) -> Self {
        Self::from_path(self.path.d(h))
    }

    pub fn bracket(&self, h: &Dgla, other: &Self) -> Result<Self> {
        Ok(Self::from_path(self.path.bracket(h, &other.path)?))
    }
}

/// Endpoint conditions, membership of `x` in `n`, and degree homogeneity.
pub fn holim_validate(h: &Dgla, n: &SubDgla, e: &HolimElement) -> ValidationReport {
    let mut report = ValidationReport::ok();
    let s = h.space();
    if let Err(err) = e.path.degree(h) {
        report.push(Check::Degree, vec!["path".into()], vec![("error".into(), err.to_string())]);
    }
    if e.path.at_zero() != e.x {
        report.push_vector(Check::Endpoint, vec!["t=0".into()], s, &linalg::sub(&e.path.at_zero(), &e.x));
    }
    if !n.contains(&e.x) {
        report.push_vector(Check::Closure, vec!["x".into()], s, &e.x);
    }
    let one = e.path.at_one();
    if !linalg::is_zero(&one) {
        report.push_vector(Check::Endpoint, vec!["t=1".into()], s, &one);
    }
    report
}

/// `(x, p + dt q) ↦ ∫₀¹ q dt mod n`, in the coordinates of the quotient `h/n`.
pub fn holim_project(quotient: &Quotient, e: &HolimElement) -> Vector {
    quotient.projection.apply(&e.path.integrate_q())
}

/// `h ⊗ Ω` truncated at `t`-degree `D` for `p` and `D - 1` for `q`.
#[derive(Debug, Clone)]
pub struct PathSpace {
    h_dim: usize,
    tdeg: usize,
    pub space: GradedSpace,
    /// Ambient basis position -> (is dt-part, h index, power of t).
    slots: Vec<(bool, usize, usize)>,
    index: BTreeMap<(bool, usize, usize), usize>,
}

impl PathSpace {
    pub fn new(h: &Dgla, tdeg: usize) -> Result<Self> {
        let hs = h.space();
        let mut comps: BTreeMap<i32, Vec<(bool, usize, usize)>> = BTreeMap::new();
        for e in 0..h.dim() {
            for k in 0..=tdeg {
                comps.entry(hs.degree(e)).or_default().push((false, e, k));
            }
            for k in 0..tdeg {
                comps.entry(hs.degree(e) + 1).or_default().push((true, e, k));
            }
        }
        let label = |&(dt, e, k): &(bool, usize, usize)| {
            if dt {
                format!("{}*t^{k}dt", hs.label(e))
            } else {
                format!("{}*t^{k}", hs.label(e))
            }
        };
        let space = GradedSpace::new(comps.iter().map(|(d, v)| (*d, v.iter().map(label).collect())).collect())?;
        let slots: Vec<_> = comps.values().flatten().copied().collect();
        let index = slots.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        Ok(Self { h_dim: h.dim(), tdeg, space, slots, index })
    }

    pub fn to_path(&self, v: &[Scalar]) -> PathElement {
        let mut p = vec![linalg::zeros(self.h_dim); self.tdeg + 1];
        let mut q = vec![linalg::zeros(self.h_dim); self.tdeg];
        for (k, c) in linalg::support(v) {
            let (dt, e, pow) = self.slots[k];
            if dt {
                q[pow][e] = c.clone();
            } else {
                p[pow][e] = c.clone();
            }
        }
        PathElement::new(self.h_dim, p, q)
    }

    pub fn from_path(&self, gamma: &PathElement) -> Result<Vector> {
        let mut v = linalg::zeros(self.space.dim());
        for (dt, coeffs) in [(false, &gamma.p), (true, &gamma.q)] {
            for (pow, c) in coeffs.iter().enumerate() {
                for (e, x) in linalg::support(c) {
                    let k = self
                        .index
                        .get(&(dt, e, pow))
                        .ok_or_else(|| Error::OutOfRange(format!("path exceeds t-degree {}", self.tdeg)))?;
                    v[*k] = x.clone();
                }
            }
        }
        Ok(v)
    }
}

/// The subcomplex of `h ⊗ Ω_{≤D}` cut out by `p(0) ∈ n` and `p(1) = 0`.
#[derive(Debug, Clone)]
pub struct BoundedHolim {
    pub h: Dgla,
    pub n: SubDgla,
    pub tdeg: usize,
    pub paths: PathSpace,
    pub sub: SubComplex,
    pub quotient: Quotient,
    /// `(h/n)[-1]`
    pub target: Complex,
    /// Projection to `(h/n)[-1]` on the basis of `sub`.
    pub projection: GradedMap,
}

impl BoundedHolim {
    pub fn new(h: &Dgla, n: &SubDgla, tdeg: usize) -> Result<Self> {
        if tdeg == 0 {
            return Err(Error::OutOfRange("t-degree bound must be at least 1".into()));
        }
        if n.parent() != h {
            return Err(Error::HostMismatch);
        }
        let (_, quotient) = sub_quotient(n)?;
        let paths = PathSpace::new(h, tdeg)?;
        let amb = &paths.space;
        let qdim = quotient.complex.dim();
        let mut spans = Vec::new();
        for deg in amb.degrees() {
            let range = amb.range(deg).expect("listed degree");
            // constraints: p(1) (h coordinates) and p(0) mod n (quotient coordinates)
            let mut m = Matrix::zeros(h.dim() + qdim, range.len());
            for (col, k) in range.clone().enumerate() {
                let gamma = paths.to_path(&amb.unit(k));
                let at1 = gamma.at_one();
                let at0 = quotient.projection.apply(&gamma.at_zero());
                for (r, x) in at1.iter().chain(at0.iter()).enumerate() {
                    m[(r, col)] = x.clone();
                }
            }
            for v in m.nullspace() {
                spans.push(amb.embed(deg, &v));
            }
        }
        let d_images: Vec<Vector> = (0..amb.dim())
            .map(|k| paths.from_path(&paths.to_path(&amb.unit(k)).d(h)).expect("d keeps the t-degree bound"))
            .collect();
        let d = GradedMap::from_images(amb.clone(), amb.clone(), 1, &d_images)?;
        let ambient = Complex::new(amb.clone(), d)?;
        let sub = ambient.subcomplex(&spans)?;
        let target = quotient.complex.shift(-1);
        let proj_images: Vec<Vector> = (0..sub.complex.dim())
            .map(|k| {
                let gamma = paths.to_path(&sub.inclusion.image(k));
                quotient.projection.apply(&gamma.integrate_q())
            })
            .collect();
        let projection = GradedMap::from_images(sub.complex.space().clone(), target.space().clone(), 0, &proj_images)?;
        Ok(Self { h: h.clone(), n: n.clone(), tdeg, paths, sub, quotient, target, projection })
    }

    pub fn complex(&self) -> &Complex {
        &self.sub.complex
    }

    /// Coordinates of an element in the basis of the bounded holim complex.
    pub fn coordinates(&self, e: &HolimElement) -> Result<Vector> {
        let amb = self.paths.from_path(&e.path)?;
        let basis: Vec<Vector> = (0..self.sub.complex.dim()).map(|k| self.sub.inclusion.image(k)).collect();
        linalg::coordinates(self.paths.space.dim(), &basis, &amb)
            .ok_or_else(|| Error::Precondition("element violates the endpoint conditions".into()))
    }

    pub fn element(&self, coords: &[Scalar]) -> HolimElement {
        HolimElement::from_path(self.paths.to_path(&self.sub.inclusion.apply(coords)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolimCohomology {
    pub tdeg: usize,
    pub ranks: BTreeMap<i32, usize>,
    /// Ranks of `H^*((h/n)[-1])`.
    pub expected: BTreeMap<i32, usize>,
    /// Rank of the map induced by the projection, per degree.
    pub projection_ranks: BTreeMap<i32, usize>,
}

impl HolimCohomology {
    pub fn agrees(&self) -> bool {
        self.ranks == self.expected && self.projection_ranks == self.expected
    }
}

pub fn holim_cohomology_bounded(h: &Dgla, n: &SubDgla, tdeg: usize) -> Result<HolimCohomology> {
    let b = BoundedHolim::new(h, n, tdeg)?;
    let hs = b.complex().cohomology();
    let ht = b.target.cohomology();
    let induced = complex::induced_map_on_cohomology(&b.projection, b.complex(), &b.target)?;
    let projection_ranks = induced.blocks().iter().map(|(d, m)| (*d, m.rank())).filter(|(_, r)| *r > 0).collect();
    Ok(HolimCohomology { tdeg, ranks: hs.ranks(), expected: ht.ranks(), projection_ranks })
}

/// Ranks at several `t`-degree bounds, to report stabilization.
pub fn holim_stabilization(h: &Dgla, n: &SubDgla, bounds: &[usize]) -> Result<Vec<HolimCohomology>> {
    bounds.iter().map(|&d| holim_cohomology_bounded(h, n, d)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HolimMapReport {
    /// Arity-1 component `a ↦ (l_a, (1-t) l_a - dt i_a)` is a chain map.
    pub chain_map: bool,
    /// Composite with the projection equals `-i mod n`.
    pub composite_is_minus_i: bool,
    /// Gauge flow `Φ(t) = e^{t i} * l` in the convolution dgla: `Φ(1) = 0`.
    pub flow_ends_at_zero: bool,
    /// `Φ(t) - dt i` is Maurer-Cartan in the path algebra of the convolution dgla.
    pub flow_is_mc: bool,
    /// Induced map on cohomology `H(g) -> H((h/n)[-1])`, ranks per degree.
    pub induced_ranks: BTreeMap<i32, usize>,
    pub arity: usize,
}

/// `g → holim(n ⇉ h)` built from a Cartan homotopy whose `l` lands in `n`.
pub fn map_into_holim(i: &CartanHomotopy, n: &SubDgla, arity: usize) -> Result<HolimMapReport> {
    let g = &i.source;
    let h = &i.target;
    let l = i.lie_from_cartan()?;
    for a in 0..g.dim() {
        if !n.contains(&l.map.image(a)) {
            return Err(Error::Precondition(format!("l({}) is not in n", g.space().label(a))));
        }
    }
    let b = BoundedHolim::new(h, n, 1)?;
    let images: Vec<Vector> = (0..g.dim())
        .map(|a| {
            let la = l.map.image(a);
            let path = PathElement::new(h.dim(), vec![la.clone(), linalg::neg(&la)], vec![linalg::neg(&i.i(a))]);
            b.coordinates(&HolimElement::from_path(path))
        })
        .collect::<Result<_>>()?;
    let map = GradedMap::from_images(g.space().clone(), b.complex().space().clone(), 0, &images)?;
    let chain_map = complex::check_chain_map(&map, g.complex(), b.complex()).is_ok();
    let composite = b.projection.compose(&map)?;
    let minus_i: Vec<Vector> = (0..g.dim()).map(|a| b.quotient.projection.apply(&linalg::neg(&i.i(a)))).collect();
    let composite_is_minus_i = (0..g.dim()).all(|a| composite.image(a) == minus_i[a]);
    let induced_ranks = if chain_map {
        complex::induced_map_on_cohomology(&composite, g.complex(), &b.target)?
            .blocks()
            .iter()
            .map(|(d, m)| (*d, m.rank()))
            .filter(|(_, r)| *r > 0)
            .collect()
    } else {
        BTreeMap::new()
    };
    let hom = HomDgla::new(g, h, arity)?;
    let i_el = i.to_hom(&hom)?;
    let l_el = hom.strict_element(&l.map)?;
    let flow = mc::gauge_path(hom.dgla(), &i_el, &l_el)?;
    let flow_ends_at_zero = linalg::is_zero(&flow.at_one());
    let flow_is_mc = flow.is_mc(hom.dgla())?;
    Ok(HolimMapReport { chain_map, composite_is_minus_i, flow_ends_at_zero, flow_is_mc, induced_ranks, arity })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiAbelianReport {
    /// The section, viewed from the abelian dgla `(h/n)[-1]`, is a Cartan homotopy.
    pub cartan: bool,
    /// Its associated morphism `l` vanishes.
    pub l_is_zero: bool,
    /// `(0, e^s)` is a chain map into the bounded holim.
    pub chain_map: bool,
    /// Ranks of the induced map on cohomology, per degree.
    pub induced_ranks: BTreeMap<i32, usize>,
    pub source_ranks: BTreeMap<i32, usize>,
    pub target_ranks: BTreeMap<i32, usize>,
    pub isomorphism: bool,
}

/// `section` spans a d-stable complement of `n` in `h`.
pub fn quasi_abelian_witness(h: &Dgla, n: &SubDgla, section: &[Vector], tdeg: usize) -> Result<QuasiAbelianReport> {
    let dim = h.dim();
    for v in section {
        if v.len() != dim {
            return Err(Error::Dimension("section vector has the wrong length".into()));
        }
        if matches!(h.space().homogeneity(v), Homogeneity::Mixed) {
            return Err(Error::Structural("section vectors must be homogeneous".into()));
        }
    }
    let section = linalg::span_basis(dim, section);
    let mut all = n.basis().to_vec();
    all.extend(section.iter().cloned());
    if linalg::span_rank(dim, &all) != dim || n.dim() + section.len() != dim {
        return Err(Error::Precondition("section does not span a complement of n".into()));
    }
    for v in &section {
        if !linalg::in_span(dim, &section, &h.d(v)) {
            return Err(Error::NotChainMap("section is not d-stable".into()));
        }
    }
    let b = BoundedHolim::new(h, n, tdeg)?;
    let shifted = b.target.clone();
    let abelian = Dgla::abelian(shifted.clone());
    // s: (h/n) -> h, inverse of the projection restricted to the section
    let qdim = b.quotient.complex.dim();
    let projected: Vec<Vector> = section.iter().map(|v| b.quotient.projection.apply(v)).collect();
    let s_images: Vec<Vector> = (0..qdim)
        .map(|c| {
            let coords = linalg::coordinates(qdim, &projected, &linalg::unit(qdim, c)).expect("projection is onto");
            let mut out = linalg::zeros(dim);
            for (v, x) in section.iter().zip(&coords) {
                linalg::axpy(&mut out, x, v);
            }
            out
        })
        .collect();
    let s_map = GradedMap::from_images(shifted.space().clone(), h.space().clone(), -1, &s_images)?;
    let cartan = CartanHomotopy::new(abelian.clone(), h.clone(), s_map)?;
    let rep = cartan.check();
    let l_is_zero = cartan.lie_map().is_zero();
    let images: Vec<Vector> = (0..qdim)
        .map(|c| {
            let path = PathElement::new(dim, Vec::new(), vec![linalg::neg(&s_images[c])]);
            b.coordinates(&HolimElement::from_path(path))
        })
        .collect::<Result<_>>()?;
    let map = GradedMap::from_images(shifted.space().clone(), b.complex().space().clone(), 0, &images)?;
    let chain_map = complex::check_chain_map(&map, &shifted, b.complex()).is_ok();
    let source_ranks = shifted.cohomology().ranks();
    let target_ranks = b.complex().cohomology().ranks();
    let induced_ranks: BTreeMap<i32, usize> = if chain_map {
        complex::induced_map_on_cohomology(&map, &shifted, b.complex())?
            .blocks()
            .iter()
            .map(|(d, m)| (*d, m.rank()))
            .filter(|(_, r)| *r > 0)
            .collect()
    } else {
        BTreeMap::new()
    };
    let isomorphism = chain_map && induced_ranks == source_ranks && induced_ranks == target_ranks;
    Ok(QuasiAbelianReport {
        cartan: rep.is_cartan(),
        l_is_zero,
        chain_map,
        induced_ranks,
        source_ranks,
        target_ranks,
        isomorphism,
    })
}

/// `(1 - t) v` as a holim path.
pub fn linear_path(v: &[Scalar]) -> HolimElement {
    HolimElement::from_path(PathElement::new(v.len(), vec![v.to_vec(), linalg::neg(v)], Vec::new()))
}

/// `c·dt` as a holim path.
pub fn dt_path(c: &[Scalar]) -> HolimElement {
    HolimElement::from_path(PathElement::new(c.len(), Vec::new(), vec![c.to_vec()]))
}
