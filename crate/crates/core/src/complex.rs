//! Cochain complexes, cohomology, shifts, sub- and quotient complexes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Homogeneity};
use crate::linalg::{self, Matrix, Vector};
use crate::scalar::{self, Scalar};

/// A graded space with a degree +1 differential squaring to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    space: GradedSpace,
    differential: GradedMap,
}

impl Complex {
    pub fn new(space: GradedSpace, differential: GradedMap) -> Result<Self> {
        if differential.source() != &space || differential.target() != &space {
            return Err(Error::Dimension("differential must be an endomorphism of the space".into()));
        }
        if differential.shift() != 1 {
            return Err(Error::Structural(format!("differential has degree {}, expected 1", differential.shift())));
        }
        let dd = differential.compose(&differential)?;
        if let Some((deg, _)) = dd.blocks().iter().next() {
            return Err(Error::Structural(format!("d∘d is nonzero on degree {deg}")));
        }
        Ok(Self { space, differential })
    }

    /// Complex with zero differential.
    pub fn trivial(space: GradedSpace) -> Self {
        let d = GradedMap::zero(space.clone(), space.clone(), 1);
        Self { space, differential: d }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn differential(&self) -> &GradedMap {
        &self.differential
    }

    pub fn d(&self, v: &[Scalar]) -> Vector {
        self.differential.apply(v)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `(C[k])^n = C^{n+k}` with differential `(-1)^k d`.
    pub fn shift(&self, k: i32) -> Complex {
        let space = self.space.shifted(k);
        let sign = scalar::sign(k as i64);
        let blocks = self.differential.blocks().iter().map(|(deg, m)| (deg - k, m.scaled(&sign))).collect();
        let d = GradedMap::new(space.clone(), space.clone(), 1, blocks).expect("shift preserves block shapes");
        Complex { space, differential: d }
    }

    /// Euler characteristic `Σ (-1)^n dim C^n`.
    pub fn euler_characteristic(&self) -> i64 {
        self.space.degrees().into_iter().map(|d| scalar_sign(d) * self.space.dim_in(d) as i64).sum()
    }

    /// Solves `d x = target` for `x` of degree `deg - 1`, free coordinates zero.
    pub fn solve_coboundary(&self, deg: i32, target: &[Scalar]) -> Option<Vector> {
        let local_target = self.space.restrict(target, deg);
        if self.space.dim_in(deg - 1) == 0 {
            return linalg::is_zero(target).then(|| self.space.zero_vector());
        }
        if local_target.is_empty() {
            return Some(self.space.zero_vector());
        }
        let x = self.differential.block(deg - 1).solve(&local_target)?;
        Some(self.space.embed(deg - 1, &x))
    }

    pub fn cohomology(&self) -> Cohomology {
        let degrees = self.space.degrees();
        let per_degree: Vec<(i32, DegreeCohomology)> = crate::par::map(&degrees, |&n| (n, degree_cohomology(self, n)));
        Cohomology { space: self.space.clone(), degrees: per_degree.into_iter().collect() }
    }

    /// Restriction to the subcomplex spanned degree-wise by `spans` (global vectors).
    pub fn subcomplex(&self, spans: &[Vector]) -> Result<SubComplex> {
        let per_degree = group_by_degree(&self.space, spans)?;
        let mut comps = BTreeMap::new();
        let mut basis: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
        for (deg, vs) in per_degree {
            let b = linalg::span_basis(self.space.dim(), &vs);
            comps.insert(deg, (0..b.len()).map(|k| format!("s{deg}.{k}")).collect::<Vec<_>>());
            basis.insert(deg, b);
        }
        let space = GradedSpace::new(comps)?;
        let mut dblocks = BTreeMap::new();
        for (deg, b) in &basis {
            let empty = Vec::new();
            let next = basis.get(&(deg + 1)).unwrap_or(&empty);
            let mut m = Matrix::zeros(next.len(), b.len());
            for (j, v) in b.iter().enumerate() {
                let dv = self.d(v);
                let c = linalg::coordinates(self.space.dim(), next, &dv)
                    .ok_or_else(|| Error::NotClosed { degree: *deg, detail: "differential leaves the span".into() })?;
                for (i, x) in c.into_iter().enumerate() {
                    m[(i, j)] = x;
                }
            }
            dblocks.insert(*deg, m);
        }
        let d = GradedMap::new(space.clone(), space.clone(), 1, dblocks)?;
        let images: Vec<Vector> = basis.values().flatten().cloned().collect();
        let inclusion = GradedMap::from_images(space.clone(), self.space.clone(), 0, &images)?;
        Ok(SubComplex { complex: Complex::new(space, d)?, inclusion })
    }

    /// Quotient by the d-closed subspace spanned degree-wise by `spans`.
    ///
    /// The quotient basis consists of the standard basis vectors of `self` not
    /// absorbed by the span (leftmost first), keeping their labels.
    pub fn quotient(&self, spans: &[Vector]) -> Result<Quotient> {
        let per_degree = group_by_degree(&self.space, spans)?;
        let n = self.space.dim();
        let mut sub_basis: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
        for (deg, vs) in &per_degree {
            sub_basis.insert(*deg, linalg::span_basis(n, vs));
        }
        for (deg, b) in &sub_basis {
            let empty = Vec::new();
            let next = sub_basis.get(&(deg + 1)).unwrap_or(&empty);
            for v in b {
                if !linalg::in_span(n, next, &self.d(v)) {
                    return Err(Error::NotClosed { degree: *deg, detail: "sub-complex is not closed under d".into() });
                }
            }
        }
        let mut comps = BTreeMap::new();
        let mut complement: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for deg in self.space.degrees() {
            let b = sub_basis.get(&deg).cloned().unwrap_or_default();
            let range = self.space.range(deg).expect("occupied degree");
            let mut cols = b.clone();
            cols.extend(range.clone().map(|i| self.space.unit(i)));
            let pivots = linalg::independent_subset(n, &cols);
            let chosen: Vec<usize> =
                pivots.into_iter().filter(|&p| p >= b.len()).map(|p| range.start + p - b.len()).collect();
            comps.insert(deg, chosen.iter().map(|&i| self.space.label(i).to_string()).collect::<Vec<_>>());
            complement.insert(deg, chosen);
        }
        let qspace = GradedSpace::new(comps)?;
        // coordinates relative to (sub basis ++ complement) in each degree
        let mut proj_images = Vec::with_capacity(n);
        for i in 0..n {
            let deg = self.space.degree(i);
            let b = sub_basis.get(&deg).cloned().unwrap_or_default();
            let comp = &complement[&deg];
            let mut cols = b.clone();
            cols.extend(comp.iter().map(|&j| self.space.unit(j)));
            let c = linalg::coordinates(n, &cols, &self.space.unit(i)).expect("spanning family");
            let local: Vec<Scalar> = c[b.len()..].to_vec();
            proj_images.push(qspace.embed(deg, &local));
        }
        let projection = GradedMap::from_images(self.space.clone(), qspace.clone(), 0, &proj_images)?;
        let lift_images: Vec<Vector> = complement.values().flatten().map(|&j| self.space.unit(j)).collect();
        let lift = GradedMap::from_images(qspace.clone(), self.space.clone(), 0, &lift_images)?;
        let dq = projection.compose(&self.differential)?.compose(&lift)?;
        let complex = Complex::new(qspace, dq)?;
        Ok(Quotient { complex, projection, lift })
    }
}

fn scalar_sign(d: i32) -> i64 {
    if d.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn group_by_degree(space: &GradedSpace, spans: &[Vector]) -> Result<BTreeMap<i32, Vec<Vector>>> {
    let mut out: BTreeMap<i32, Vec<Vector>> = BTreeMap::new();
    for v in spans {
        if v.len() != space.dim() {
            return Err(Error::Dimension("spanning vector has the wrong length".into()));
        }
        match space.homogeneity(v) {
            Homogeneity::Zero => {}
            Homogeneity::Degree(d) => out.entry(d).or_default().push(v.clone()),
            Homogeneity::Mixed => return Err(Error::Structural("spanning vector is not homogeneous".into())),
        }
    }
    Ok(out)
}

/// Local coordinate order used for pivoting: basis labels ascending.
fn label_order(space: &GradedSpace, deg: i32) -> Vec<usize> {
    let labels = space.labels_in(deg);
    let mut idx: Vec<usize> = (0..labels.len()).collect();
    idx.sort_by(|&a, &b| labels[a].cmp(labels[b]));
    idx
}

fn degree_cohomology(c: &Complex, n: i32) -> DegreeCohomology {
    let space = c.space();
    let dim = space.dim_in(n);
    let order = label_order(space, n);
    // cocycles: kernel of d_n, computed with columns in label order
    let dn = c.differential().block(n);
    let mut permuted = Matrix::zeros(dn.rows(), dim);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..dn.rows() {
            permuted[(i, new)] = dn[(i, old)].clone();
        }
    }
    let cocycles: Vec<Vector> = if dn.rows() == 0 {
        order.iter().map(|&old| linalg::unit(dim, old)).collect()
    } else {
        permuted
            .nullspace()
            .into_iter()
            .map(|v| {
                let mut w = linalg::zeros(dim);
                for (new, &old) in order.iter().enumerate() {
                    w[old] = v[new].clone();
                }
                w
            })
            .collect()
    };
    let dprev = c.differential().block(n - 1);
    let boundaries = linalg::span_basis(dim, &dprev.columns());
    let mut cols = boundaries.clone();
    cols.extend(cocycles.iter().cloned());
    let pivots = linalg::independent_subset(dim, &cols);
    let representatives: Vec<Vector> =
        pivots.into_iter().filter(|&p| p >= boundaries.len()).map(|p| cols[p].clone()).collect();
    DegreeCohomology {
        degree: n,
        rank: representatives.len(),
        cocycle_dim: cocycles.len(),
        boundary_dim: boundaries.len(),
        representatives,
        boundaries,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeCohomology {
    pub degree: i32,
    pub rank: usize,
    pub cocycle_dim: usize,
    pub boundary_dim: usize,
    /// Representative cocycles, in local coordinates of the degree.
    pub representatives: Vec<Vector>,
    boundaries: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cohomology {
    space: GradedSpace,
    degrees: BTreeMap<i32, DegreeCohomology>,
}

impl Cohomology {
    pub fn rank(&self, deg: i32) -> usize {
        self.degrees.get(&deg).map_or(0, |d| d.rank)
    }

    /// Nonzero ranks only.
    pub fn ranks(&self) -> BTreeMap<i32, usize> {
        self.degrees.iter().filter(|(_, d)| d.rank > 0).map(|(k, d)| (*k, d.rank)).collect()
    }

    pub fn degree(&self, deg: i32) -> Option<&DegreeCohomology> {
        self.degrees.get(&deg)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees.values().map(|d| scalar_sign(d.degree) * d.rank as i64).sum()
    }

    /// Representatives as global vectors of the underlying space.
    pub fn representatives(&self, deg: i32) -> Vec<Vector> {
        self.degrees
            .get(&deg)
            .map_or_else(Vec::new, |d| d.representatives.iter().map(|r| self.space.embed(deg, r)).collect())
    }

    /// The cohomology as a graded space, basis `H<n>.<k>`.
    pub fn as_space(&self) -> GradedSpace {
        let comps =
            self.degrees.iter().map(|(n, d)| (*n, (0..d.rank).map(|k| format!("H{n}.{k}")).collect())).collect();
        GradedSpace::new(comps).expect("generated labels are unique")
    }

    /// Class of a cocycle of degree `deg` in representative coordinates.
    pub fn class_of(&self, deg: i32, cocycle: &[Scalar]) -> Result<Vector> {
        let local = self.space.restrict(cocycle, deg);
        let Some(d) = self.degrees.get(&deg) else {
            return if linalg::is_zero(cocycle) {
                Ok(Vec::new())
            } else {
                Err(Error::Structural("not a cocycle".into()))
            };
        };
        let dim = self.space.dim_in(deg);
        let mut cols = d.boundaries.clone();
        cols.extend(d.representatives.iter().cloned());
        let c = linalg::coordinates(dim, &cols, &local)
            .ok_or_else(|| Error::Structural(format!("vector is not a cocycle in degree {deg}")))?;
        Ok(c[d.boundaries.len()..].to_vec())
    }

    pub fn is_coboundary(&self, deg: i32, v: &[Scalar]) -> bool {
        let local = self.space.restrict(v, deg);
        match self.degrees.get(&deg) {
            Some(d) => linalg::in_span(self.space.dim_in(deg), &d.boundaries, &local),
            None => linalg::is_zero(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubComplex {
    pub complex: Complex,
    pub inclusion: GradedMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub complex: Complex,
    /// `C -> C/S`
    pub projection: GradedMap,
    /// Coordinate section `C/S -> C` (standard basis vectors of the complement).
    pub lift: GradedMap,
}

/// Verifies `f ∘ d_source = d_target ∘ f` for a degree-0 map.
pub fn check_chain_map(f: &GradedMap, source: &Complex, target: &Complex) -> Result<()> {
    if f.source() != source.space() || f.target() != target.space() {
        return Err(Error::Dimension("map does not match the complexes".into()));
    }
    if f.shift() != 0 {
        return Err(Error::Unsupported("chain maps of nonzero degree".into()));
    }
    let lhs = f.compose(source.differential())?;
    let rhs = target.differential().compose(f)?;
    for i in 0..source.dim() {
        let a = lhs.image(i);
        let b = rhs.image(i);
        if a != b {
            let res = linalg::sub(&a, &b);
            let desc = target
                .space()
                .describe(&res)
                .into_iter()
                .map(|(l, x)| format!("{l}:{}", scalar::format(&x)))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::NotChainMap(format!("on {}: residual {{{desc}}}", source.space().label(i))));
        }
    }
    Ok(())
}

/// Matrix of `H(f)` in the representative bases of source and target.
pub fn induced_map_on_cohomology(f: &GradedMap, source: &Complex, target: &Complex) -> Result<GradedMap> {
    check_chain_map(f, source, target)?;
    let hs = source.cohomology();
    let ht = target.cohomology();
    induced_with(f, &hs, &ht)
}

/// Same as [`induced_map_on_cohomology`] with precomputed cohomologies (no chain-map check).
pub fn induced_with(f: &GradedMap, hs: &Cohomology, ht: &Cohomology) -> Result<GradedMap> {
    let sspace = hs.as_space();
    let tspace = ht.as_space();
    let mut blocks = BTreeMap::new();
    for deg in sspace.degrees() {
        let reps = hs.representatives(deg);
        let mut m = Matrix::zeros(tspace.dim_in(deg), reps.len());
        for (j, r) in reps.iter().enumerate() {
            let c = ht.class_of(deg, &f.apply(r))?;
            for (i, x) in c.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        blocks.insert(deg, m);
    }
    GradedMap::new(sspace, tspace, 0, blocks)
}
