//! The endomorphism dgla `End(V)` of a complex: graded commutator and differential `[d, -]`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::Complex;
use crate::dgla::{Dgla, SparseVec};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace};
use crate::linalg::{self, Matrix, Vector};
use crate::scalar::{self, Scalar};

/// `End(V)` with basis `E[i<-j]` (the operator sending `v_j` to `v_i`), of degree `|v_i| - |v_j|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndDgla {
    base: Complex,
    dgla: Dgla,
    /// End basis position -> `(i, j)`.
    pairs: Vec<(usize, usize)>,
    /// `(i, j)` -> End basis position.
    index: Vec<Vec<usize>>,
}

pub fn label(v: &GradedSpace, i: usize, j: usize) -> String {
    format!("E[{}<-{}]", v.label(i), v.label(j))
}

impl EndDgla {
    pub fn new(base: &Complex) -> Result<Self> {
        let v = base.space();
        let n = v.dim();
        let mut comps: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                comps.entry(v.degree(i) - v.degree(j)).or_default().push((i, j));
            }
        }
        let pairs: Vec<(usize, usize)> = comps.values().flatten().copied().collect();
        let space = GradedSpace::new(
            comps.iter().map(|(d, ps)| (*d, ps.iter().map(|&(i, j)| label(v, i, j)).collect())).collect(),
        )?;
        let mut index = vec![vec![0; n]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            index[i][j] = k;
        }
        let dm = base.differential().to_dense();
        let deg = |k: usize| space.degree(k);
        let images: Vec<Vector> = (0..pairs.len())
            .map(|k| {
                let (i, j) = pairs[k];
                let mut out = linalg::zeros(pairs.len());
                // d∘E_ij = Σ_r d_ri E_rj
                for r in 0..n {
                    if !dm[(r, i)].is_zero() {
                        out[index[r][j]] += &dm[(r, i)];
                    }
                }
                // -(-1)^{|E_ij|} E_ij∘d = ∓ Σ_c d_jc E_ic
                let s = -scalar::sign(deg(k) as i64);
                for c in 0..n {
                    if !dm[(j, c)].is_zero() {
                        out[index[i][c]] += &s * &dm[(j, c)];
                    }
                }
                out
            })
            .collect();
        let d = GradedMap::from_images(space.clone(), space.clone(), 1, &images)?;
        let complex = Complex::new(space.clone(), d)?;
        let pairs_ref = &pairs;
        let index_ref = &index;
        let dgla = Dgla::from_upper(complex, |a, b| {
            let (i, j) = pairs_ref[a];
            let (k, l) = pairs_ref[b];
            let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
            if j == k {
                *out.entry(index_ref[i][l]).or_insert_with(scalar::zero) += scalar::one();
            }
            if l == i {
                let s = -scalar::sign((deg(a) as i64) * (deg(b) as i64));
                *out.entry(index_ref[k][j]).or_insert_with(scalar::zero) += s;
            }
            out.into_iter().filter(|(_, x)| !x.is_zero()).collect::<SparseVec>()
        });
        Ok(Self { base: base.clone(), dgla, pairs, index })
    }

    pub fn dgla(&self) -> &Dgla {
        &self.dgla
    }

    pub fn base(&self) -> &Complex {
        &self.base
    }

    pub fn position(&self, i: usize, j: usize) -> usize {
        self.index[i][j]
    }

    pub fn pair(&self, k: usize) -> (usize, usize) {
        self.pairs[k]
    }

    /// Dense operator matrix of an End element.
    pub fn to_matrix(&self, v: &[Scalar]) -> Matrix {
        let n = self.base.dim();
        let mut m = Matrix::zeros(n, n);
        for (k, x) in linalg::support(v) {
            let (i, j) = self.pairs[k];
            m[(i, j)] += x;
        }
        m
    }

    pub fn from_matrix(&self, m: &Matrix) -> Result<Vector> {
        let n = self.base.dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::Dimension("operator matrix does not match the base space".into()));
        }
        let mut v = linalg::zeros(self.pairs.len());
        for i in 0..n {
            for j in 0..n {
                v[self.index[i][j]] = m[(i, j)].clone();
            }
        }
        Ok(v)
    }

    /// End element from the images of the base basis vectors.
    pub fn from_images(&self, images: &[Vector]) -> Result<Vector> {
        let n = self.base.dim();
        if images.len() != n || images.iter().any(|v| v.len() != n) {
            return Err(Error::Dimension("one image of base dimension per basis vector".into()));
        }
        self.from_matrix(&Matrix::from_columns(n, images))
    }

    /// Applies an End element to a vector of the base.
    pub fn act(&self, op: &[Scalar], v: &[Scalar]) -> Vector {
        self.to_matrix(op).apply(v)
    }

    /// Operator of the differential of the base, as a matrix.
    pub fn d_matrix(&self) -> Matrix {
        self.base.differential().to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn interval() -> Complex {
        let v = GradedSpace::from_degrees(&[(0, &["a"][..]), (1, &["b"][..])]).unwrap();
        let d = GradedMap::new(v.clone(), v.clone(), 1, BTreeMap::from([(0, Matrix::identity(1))])).unwrap();
        Complex::new(v, d).unwrap()
    }

    #[test]
    fn end_of_interval_is_valid_and_acyclic() {
        let e = EndDgla::new(&interval()).unwrap();
        assert_eq!(e.dgla().space().dim_in(-1), 1);
        assert_eq!(e.dgla().space().dim_in(0), 2);
        assert_eq!(e.dgla().space().dim_in(1), 1);
        assert!(e.dgla().validate().is_valid());
        assert!(e.dgla().complex().cohomology().ranks().is_empty());
    }

    #[test]
    fn bracket_is_graded_commutator() {
        let e = EndDgla::new(&interval()).unwrap();
        let n = e.dgla().dim();
        let s = e.dgla().space();
        for a in 0..n {
            for b in 0..n {
                let (x, y) = (s.unit(a), s.unit(b));
                let (mx, my) = (e.to_matrix(&x), e.to_matrix(&y));
                let sg = scalar::sign((s.degree(a) * s.degree(b)) as i64);
                let expect = mx.mul(&my).add(&my.mul(&mx).scaled(&-sg));
                assert_eq!(e.to_matrix(&e.dgla().bracket(&x, &y)), expect);
            }
        }
        // [d, E[b<-a]] for d = E[b<-a] itself.
        let d_op = e.from_matrix(&e.d_matrix()).unwrap();
        for k in 0..n {
            let x = s.unit(k);
            assert_eq!(e.dgla().d(&x), e.dgla().bracket(&d_op, &x));
        }
        assert_eq!(e.act(&d_op, &[int(1), int(0)]), vec![int(0), int(1)]);
    }
}
