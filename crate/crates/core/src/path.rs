//! Polynomial paths `γ = p(t) + dt·q(t)` in `h ⊗ K[t, dt]`.
//!
//! Coefficients are stored densely by power of `t`. With `dt` written on the left,
//! `d(p + dt q) = d_h p + dt (ṗ - d_h q)` and
//! `[p₁ + dt q₁, p₂ + dt q₂] = [p₁,p₂] + dt ((-1)^{|γ₁|} [p₁,q₂] + [q₁,p₂])`.

use crate::dgla::Dgla;
use crate::error::{Error, Result};
use crate::graded::Homogeneity;
use crate::linalg::{self, Vector};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathElement {
    dim: usize,
    /// `p = Σ_k p[k] t^k`
    pub p: Vec<Vector>,
    /// `q = Σ_k q[k] t^k`
    pub q: Vec<Vector>,
}

fn trim(mut v: Vec<Vector>) -> Vec<Vector> {
    while v.last().is_some_and(|c| linalg::is_zero(c)) {
        v.pop();
    }
    v
}

fn poly_add(a: &[Vector], b: &[Vector], dim: usize) -> Vec<Vector> {
    let n = a.len().max(b.len());
    let z = linalg::zeros(dim);
    (0..n).map(|k| linalg::add(a.get(k).unwrap_or(&z), b.get(k).unwrap_or(&z))).collect()
}

fn poly_bracket(g: &Dgla, a: &[Vector], b: &[Vector], sign: &Scalar) -> Vec<Vector> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![linalg::zeros(g.dim()); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if linalg::is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let br = g.bracket(x, y);
            linalg::axpy(&mut out[i + j], sign, &br);
        }
    }
    out
}

impl PathElement {
    pub fn new(dim: usize, p: Vec<Vector>, q: Vec<Vector>) -> Self {
        Self { dim, p: trim(p), q: trim(q) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, p: Vec::new(), q: Vec::new() }
    }

    /// The constant path at `v`.
    pub fn constant(v: &[Scalar]) -> Self {
        Self::new(v.len(), vec![v.to_vec()], Vec::new())
    }

    /// `t^k v`.
    pub fn monomial(v: &[Scalar], k: usize) -> Self {
        let mut p = vec![linalg::zeros(v.len()); k];
        p.push(v.to_vec());
        Self::new(v.len(), p, Vec::new())
    }

    /// `dt t^k v`.
    pub fn dt_monomial(v: &[Scalar], k: usize) -> Self {
        let mut q = vec![linalg::zeros(v.len()); k];
        q.push(v.to_vec());
        Self::new(v.len(), Vec::new(), q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_empty() && self.q.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.dim, poly_add(&self.p, &other.p, self.dim), poly_add(&self.q, &other.q, self.dim))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let f = |v: &Vec<Vector>| v.iter().map(|x| linalg::scale(c, x)).collect();
        Self::new(self.dim, f(&self.p), f(&self.q))
    }

    /// Largest power of `t` in `p` and `q` (`None` for the zero path).
    pub fn t_degree(&self) -> (Option<usize>, Option<usize>) {
        (self.p.len().checked_sub(1), self.q.len().checked_sub(1))
    }

    /// Total degree: `|p| = k`, `|q| = k - 1`.
    pub fn degree(&self, g: &Dgla) -> Result<Option<i32>> {
        let mut deg: Option<i32> = None;
        let mut note = |d: i32| -> Result<()> {
            match deg {
                Some(e) if e != d => Err(Error::WrongDegree { expected: e, found: d.to_string() }),
                _ => {
                    deg = Some(d);
                    Ok(())
                }
            }
        };
        for (coeffs, offset) in [(&self.p, 0), (&self.q, 1)] {
            for c in coeffs {
                match g.space().homogeneity(c) {
                    Homogeneity::Zero => {}
                    Homogeneity::Degree(d) => note(d + offset)?,
                    Homogeneity::Mixed => return Err(Error::WrongDegree { expected: 0, found: "mixed".into() }),
                }
            }
        }
        Ok(deg)
    }

    pub fn eval_p(&self, t: &Scalar) -> Vector {
        let mut acc = linalg::zeros(self.dim);
        for c in self.p.iter().rev() {
            acc = linalg::add(&linalg::scale(t, &acc), c);
        }
        acc
    }

    pub fn at_zero(&self) -> Vector {
        self.p.first().cloned().unwrap_or_else(|| linalg::zeros(self.dim))
    }

    pub fn at_one(&self) -> Vector {
        self.eval_p(&scalar::one())
    }

    /// `ṗ`
    pub fn p_derivative(&self) -> Vec<Vector> {
        self.p.iter().enumerate().skip(1).map(|(k, c)| linalg::scale(&scalar::int(k as i64), c)).collect()
    }

    /// `∫₀¹ q(t) dt`
    pub fn integrate_q(&self) -> Vector {
        let mut acc = linalg::zeros(self.dim);
        for (k, c) in self.q.iter().enumerate() {
            linalg::axpy(&mut acc, &scalar::frac(1, k as i64 + 1), c);
        }
        acc
    }

    /// `d(p + dt q) = d_h p + dt (ṗ - d_h q)`
    pub fn d(&self, g: &Dgla) -> Self {
        let p = self.p.iter().map(|c| g.d(c)).collect();
        let dq: Vec<Vector> = self.q.iter().map(|c| linalg::neg(&g.d(c))).collect();
        let q = poly_add(&self.p_derivative(), &dq, self.dim);
        Self::new(self.dim, p, q)
    }

    /// Bracket of homogeneous paths; `self` must have degree `k1` (its `p` part degree).
    pub fn bracket(&self, g: &Dgla, other: &Self) -> Result<Self> {
        let k1 = self.degree(g)?.unwrap_or(0);
        let p = poly_bracket(g, &self.p, &other.p, &scalar::one());
        let q1 = poly_bracket(g, &self.p, &other.q, &scalar::sign(k1 as i64));
        let q2 = poly_bracket(g, &self.q, &other.p, &scalar::one());
        Ok(Self::new(self.dim, p, poly_add(&q1, &q2, self.dim)))
    }

    /// The two components of `dγ + ½[γ,γ]` for `γ` of degree 1:
    /// `d p + ½[p,p]` and `ṗ - dq - [p,q]`, each as a polynomial in `t`.
    pub fn mc_components(&self, g: &Dgla) -> Result<(Vec<Vector>, Vec<Vector>)> {
        if let Some(d) = self.degree(g)? {
            if d != 1 {
                return Err(Error::WrongDegree { expected: 1, found: d.to_string() });
            }
        }
        let half = scalar::frac(1, 2);
        let dg = self.d(g);
        let br = self.bracket(g, self)?.scale(&half);
        let total = dg.add(&br);
        Ok((total.p, total.q))
    }

    pub fn is_mc(&self, g: &Dgla) -> Result<bool> {
        let (a, b) = self.mc_components(g)?;
        Ok(a.is_empty() && b.is_empty())
    }
}
