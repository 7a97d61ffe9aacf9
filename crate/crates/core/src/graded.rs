//! Finitely supported graded vector spaces and degree-homogeneous maps between them.
//!
//! Elements are dense coordinate vectors over the whole space; the basis is ordered
//! by degree, and within a degree by declaration order.

use std::collections::BTreeMap;
use std::ops::Range;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<(i32, String)>,
    ranges: BTreeMap<i32, Range<usize>>,
}

/// Degree profile of a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    Zero,
    Degree(i32),
    Mixed,
}

impl GradedSpace {
    pub fn new(components: BTreeMap<i32, Vec<String>>) -> Result<Self> {
        let mut basis = Vec::new();
        let mut ranges = BTreeMap::new();
        for (deg, labels) in components {
            if labels.is_empty() {
                continue;
            }
            let mut seen = std::collections::BTreeSet::new();
            for l in &labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::Structural(format!("duplicate basis label {l:?} in degree {deg}")));
                }
            }
            let start = basis.len();
            basis.extend(labels.into_iter().map(|l| (deg, l)));
            ranges.insert(deg, start..basis.len());
        }
        Ok(Self { basis, ranges })
    }

    /// Convenience constructor from `(degree, labels)` pairs.
    pub fn from_degrees<S: AsRef<str>>(parts: &[(i32, &[S])]) -> Result<Self> {
        let mut map: BTreeMap<i32, Vec<String>> = BTreeMap::new();
        for (d, ls) in parts {
            map.entry(*d).or_default().extend(ls.iter().map(|s| s.as_ref().to_string()));
        }
        Self::new(map)
    }

    pub fn zero() -> Self {
        Self { basis: Vec::new(), ranges: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_in(&self, deg: i32) -> usize {
        self.ranges.get(&deg).map_or(0, |r| r.len())
    }

    /// Degrees with nonzero component, ascending.
    pub fn degrees(&self) -> Vec<i32> {
        self.ranges.keys().copied().collect()
    }

    pub fn range(&self, deg: i32) -> Option<Range<usize>> {
        self.ranges.get(&deg).cloned()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].0
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].1
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.basis.iter().map(|(_, l)| l.as_str())
    }

    pub fn labels_in(&self, deg: i32) -> Vec<&str> {
        self.range(deg).map_or_else(Vec::new, |r| r.map(|i| self.label(i)).collect())
    }

    /// Global index of a label; labels are matched across all degrees, first hit wins.
    pub fn find(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|(_, l)| l == label)
    }

    pub fn index(&self, deg: i32, label: &str) -> Option<usize> {
        self.range(deg)?.find(|&i| self.basis[i].1 == label)
    }

    pub fn components(&self) -> BTreeMap<i32, Vec<String>> {
        self.ranges.iter().map(|(d, r)| (*d, r.clone().map(|i| self.basis[i].1.clone()).collect())).collect()
    }

    /// `V[k]` with `(V[k])^n = V^{n+k}`.
    pub fn shifted(&self, k: i32) -> Self {
        let comps = self.components().into_iter().map(|(d, ls)| (d - k, ls)).collect();
        Self::new(comps).expect("shift preserves label uniqueness")
    }

    pub fn zero_vector(&self) -> Vector {
        linalg::zeros(self.dim())
    }

    pub fn unit(&self, i: usize) -> Vector {
        linalg::unit(self.dim(), i)
    }

    pub fn homogeneity(&self, v: &[Scalar]) -> Homogeneity {
        let mut found = None;
        for (i, _) in linalg::support(v) {
            let d = self.degree(i);
            match found {
                None => found = Some(d),
                Some(e) if e != d => return Homogeneity::Mixed,
                _ => {}
            }
        }
        found.map_or(Homogeneity::Zero, Homogeneity::Degree)
    }

    /// Checks that `v` is zero or homogeneous of degree `deg`.
    pub fn check_degree(&self, v: &[Scalar], deg: i32) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} in a space of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        match self.homogeneity(v) {
            Homogeneity::Zero => Ok(()),
            Homogeneity::Degree(d) if d == deg => Ok(()),
            Homogeneity::Degree(d) => Err(Error::WrongDegree { expected: deg, found: d.to_string() }),
            Homogeneity::Mixed => Err(Error::WrongDegree { expected: deg, found: "mixed".into() }),
        }
    }

    /// Coordinates of `v` in degree `deg`.
    pub fn restrict(&self, v: &[Scalar], deg: i32) -> Vector {
        self.range(deg).map_or_else(Vec::new, |r| v[r].to_vec())
    }

    /// Global vector from coordinates in degree `deg`.
    pub fn embed(&self, deg: i32, local: &[Scalar]) -> Vector {
        let mut v = self.zero_vector();
        if let Some(r) = self.range(deg) {
            assert_eq!(r.len(), local.len());
            for (k, x) in r.zip(local) {
                v[k] = x.clone();
            }
        }
        v
    }

    /// Projection of `v` onto its degree-`deg` part, as a global vector.
    pub fn project(&self, v: &[Scalar], deg: i32) -> Vector {
        let mut out = self.zero_vector();
        if let Some(r) = self.range(deg) {
            for i in r {
                out[i] = v[i].clone();
            }
        }
        out
    }

    /// Nonzero coordinates as `(label, value)` pairs.
    pub fn describe(&self, v: &[Scalar]) -> Vec<(String, Scalar)> {
        linalg::support(v).map(|(i, x)| (self.label(i).to_string(), x.clone())).collect()
    }
}

/// Degree-homogeneous linear map `V -> W` of degree `shift`, stored as one block per source degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedMap {
    source: GradedSpace,
    target: GradedSpace,
    shift: i32,
    blocks: BTreeMap<i32, Matrix>,
}

impl GradedMap {
    pub fn new(source: GradedSpace, target: GradedSpace, shift: i32, blocks: BTreeMap<i32, Matrix>) -> Result<Self> {
        let mut clean = BTreeMap::new();
        for (deg, m) in blocks {
            let (rows, cols) = (target.dim_in(deg + shift), source.dim_in(deg));
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::Dimension(format!(
                    "block at source degree {deg} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
            if rows > 0 && cols > 0 && !m.is_zero() {
                clean.insert(deg, m);
            }
        }
        Ok(Self { source, target, shift, blocks: clean })
    }

    pub fn zero(source: GradedSpace, target: GradedSpace, shift: i32) -> Self {
        Self { source, target, shift, blocks: BTreeMap::new() }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let blocks = space.degrees().into_iter().map(|d| (d, Matrix::identity(space.dim_in(d)))).collect();
        Self::new(space.clone(), space.clone(), 0, blocks).expect("identity blocks are square")
    }

    /// Builds a map from a dense global matrix; rejects entries that break homogeneity.
    pub fn from_dense(source: GradedSpace, target: GradedSpace, shift: i32, dense: &Matrix) -> Result<Self> {
        if dense.rows() != target.dim() || dense.cols() != source.dim() {
            return Err(Error::Dimension("dense matrix does not match source/target".into()));
        }
        for i in 0..dense.rows() {
            for j in 0..dense.cols() {
                if !dense[(i, j)].is_zero() && target.degree(i) != source.degree(j) + shift {
                    return Err(Error::Structural(format!(
                        "entry ({}, {}) is not of degree {shift}",
                        target.label(i),
                        source.label(j)
                    )));
                }
            }
        }
        let mut blocks = BTreeMap::new();
        for deg in source.degrees() {
            let (Some(sr), Some(tr)) = (source.range(deg), target.range(deg + shift)) else { continue };
            let mut m = Matrix::zeros(tr.len(), sr.len());
            for (a, i) in tr.clone().enumerate() {
                for (b, j) in sr.clone().enumerate() {
                    m[(a, b)] = dense[(i, j)].clone();
                }
            }
            blocks.insert(deg, m);
        }
        Self::new(source, target, shift, blocks)
    }

    /// Builds a map from the images of source basis vectors (global target coordinates).
    pub fn from_images(source: GradedSpace, target: GradedSpace, shift: i32, images: &[Vector]) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::Dimension("one image per source basis vector required".into()));
        }
        let dense = Matrix::from_columns(target.dim(), images);
        Self::from_dense(source, target, shift, &dense)
    }

    pub fn source(&self) -> &GradedSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedSpace {
        &self.target
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn blocks(&self) -> &BTreeMap<i32, Matrix> {
        &self.blocks
    }

    pub fn block(&self, deg: i32) -> Matrix {
        self.blocks
            .get(&deg)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.target.dim_in(deg + self.shift), self.source.dim_in(deg)))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.source.dim(), "vector does not belong to the source");
        let mut out = self.target.zero_vector();
        for (deg, m) in &self.blocks {
            let sr = self.source.range(*deg).expect("block degrees are occupied");
            let local = &v[sr];
            if linalg::is_zero(local) {
                continue;
            }
            let img = m.apply(local);
            let tr = self.target.range(deg + self.shift).expect("block degrees are occupied");
            for (k, x) in tr.zip(img) {
                out[k] += x;
            }
        }
        out
    }

    /// Image of the `i`-th source basis vector.
    pub fn image(&self, i: usize) -> Vector {
        self.apply(&self.source.unit(i))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap> {
        if other.target != self.source {
            return Err(Error::Dimension("composition of maps with mismatched spaces".into()));
        }
        let mut blocks = BTreeMap::new();
        for (deg, m) in &other.blocks {
            if let Some(n) = self.blocks.get(&(deg + other.shift)) {
                blocks.insert(*deg, n.mul(m));
            }
        }
        GradedMap::new(other.source.clone(), self.target.clone(), self.shift + other.shift, blocks)
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap> {
        if self.source != other.source || self.target != other.target || self.shift != other.shift {
            return Err(Error::Dimension("sum of maps with mismatched shapes".into()));
        }
        let mut blocks = self.blocks.clone();
        for (deg, m) in &other.blocks {
            let sum = match blocks.get(deg) {
                Some(a) => a.add(m),
                None => m.clone(),
            };
            blocks.insert(*deg, sum);
        }
        GradedMap::new(self.source.clone(), self.target.clone(), self.shift, blocks)
    }

    pub fn scaled(&self, c: &Scalar) -> GradedMap {
        let blocks = self.blocks.iter().map(|(d, m)| (*d, m.scaled(c))).collect();
        GradedMap::new(self.source.clone(), self.target.clone(), self.shift, blocks).expect("same shape")
    }

    /// Dense global matrix (target dim × source dim).
    pub fn to_dense(&self) -> Matrix {
        let images: Vec<Vector> = (0..self.source.dim()).map(|i| self.image(i)).collect();
        Matrix::from_columns(self.target.dim(), &images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn space() -> GradedSpace {
        GradedSpace::from_degrees(&[(0, &["a", "b"][..]), (1, &["c"][..])]).unwrap()
    }

    #[test]
    fn layout() {
        let v = space();
        assert_eq!(v.dim(), 3);
        assert_eq!(v.dim_in(0), 2);
        assert_eq!(v.dim_in(5), 0);
        assert_eq!(v.degree(2), 1);
        assert_eq!(v.find("c"), Some(2));
        assert_eq!(v.shifted(-1).degrees(), vec![1, 2]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = GradedSpace::from_degrees(&[(0, &["a", "a"][..])]);
        assert!(matches!(r, Err(Error::Structural(_))));
        assert!(GradedSpace::from_degrees(&[(0, &["a"][..]), (1, &["a"][..])]).is_ok());
    }

    #[test]
    fn homogeneity() {
        let v = space();
        assert_eq!(v.homogeneity(&[int(1), int(0), int(0)]), Homogeneity::Degree(0));
        assert_eq!(v.homogeneity(&[int(1), int(0), int(2)]), Homogeneity::Mixed);
        assert_eq!(v.homogeneity(&v.zero_vector()), Homogeneity::Zero);
    }

    #[test]
    fn block_shape_checked() {
        let v = space();
        let bad = BTreeMap::from([(0, Matrix::zeros(2, 2))]);
        assert!(GradedMap::new(v.clone(), v.clone(), 1, bad).is_err());
        let ok = BTreeMap::from([(0, Matrix::from_rows(1, 2, vec![int(1), int(1)]))]);
        let d = GradedMap::new(v.clone(), v.clone(), 1, ok).unwrap();
        assert_eq!(d.apply(&[int(2), int(3), int(0)]), vec![int(0), int(0), int(5)]);
        let dd = d.compose(&d).unwrap();
        assert!(dd.is_zero());
        let round = GradedMap::from_dense(v.clone(), v, 1, &d.to_dense()).unwrap();
        assert_eq!(round, d);
    }
}
