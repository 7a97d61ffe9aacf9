//! The convolution dgla `Hom(C(g[1]), h)` truncated at arity `N`.
//!
//! Inputs are taken in `g[1]`-degrees `sd(a) = |a| - 1`. A basis element `(m, o)` is the
//! functional sending the symmetric monomial `m` (nondecreasing `g`-indices, no repeated
//! odd entries) to the `h`-basis vector `o` and every other monomial to zero. Its total
//! degree is `|o| - Σ sd(m)` and its bidegree is `(|o| - Σ |m_i|, |m|)`.
//!
//! * bracket: `[f,g](m) = Σ_S ε(S) (-1)^{|g| sd(m_S)} [f(m_S), g(m_{S^c})]_h` over position subsets `S`;
//! * differential: `D f = d_h∘f - (-1)^{|f|} f∘Q` with the coderivation
//!   `Q1(sa) = -s(da)`, `Q2(sa·sb) = (-1)^{|a|} s[a,b]`;
//!   `d_{1,0}` collects the `Q1` part and `d_{0,1}` the `Q2` part.
//!
//! Elements of arity `> N` form an ideal, so the truncation is a quotient dgla.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::Complex;
use crate::dgla::{Dgla, DglaMorphism, SparseVec};
use crate::error::{Error, Result};
use crate::graded::{GradedMap, GradedSpace, Homogeneity};
use crate::koszul;
use crate::linalg::{self, Vector};
use crate::par::{self, Exec};
use crate::scalar::{self, Scalar};

pub type Monomial = Vec<usize>;

/// Sparse linear combination of monomials.
type MonoCombination = Vec<(usize, Scalar)>;

#[derive(Debug, Clone)]
pub struct HomDgla {
    g: Dgla,
    h: Dgla,
    arity: usize,
    monomials: Vec<Monomial>,
    mono_index: BTreeMap<Monomial, usize>,
    /// Basis position -> (monomial index, h index).
    basis: Vec<(usize, usize)>,
    pos: BTreeMap<(usize, usize), usize>,
    /// `Q1(m)` and `Q2(m)` as combinations of monomials.
    q1: Vec<MonoCombination>,
    q2: Vec<MonoCombination>,
    d10: GradedMap,
    d01: GradedMap,
    dgla: Dgla,
}

/// Taylor coefficients `F_n` for `1 <= n <= N`, each a map from arity-`n` monomials to `h`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinfMorphism {
    pub arity: usize,
    pub taylor: Vec<BTreeMap<Monomial, Vector>>,
}

impl LinfMorphism {
    pub fn zero(arity: usize) -> Self {
        Self { arity, taylor: vec![BTreeMap::new(); arity] }
    }

    pub fn coefficient(&self, n: usize) -> &BTreeMap<Monomial, Vector> {
        &self.taylor[n - 1]
    }

    /// Whether only `F_1` can be nonzero.
    pub fn is_strict(&self) -> bool {
        self.taylor.iter().skip(1).all(|c| c.values().all(|v| linalg::is_zero(v)))
    }

    fn eval(&self, m: &[usize], hdim: usize) -> Vector {
        if m.is_empty() || m.len() > self.arity {
            return linalg::zeros(hdim);
        }
        self.taylor[m.len() - 1].get(m).cloned().unwrap_or_else(|| linalg::zeros(hdim))
    }
}

fn sd(g: &Dgla, a: usize) -> i32 {
    g.space().degree(a) - 1
}

fn enumerate_monomials(g: &Dgla, arity: usize) -> Vec<Monomial> {
    fn go(g: &Dgla, start: usize, left: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if left == 0 {
            return;
        }
        for a in start..g.dim() {
            let odd = sd(g, a).rem_euclid(2) == 1;
            if odd && cur.last() == Some(&a) {
                continue;
            }
            cur.push(a);
            go(g, a, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(g, 0, arity, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

impl HomDgla {
    pub fn new(g: &Dgla, h: &Dgla, arity: usize) -> Result<Self> {
        Self::with_exec(g, h, arity, Exec::default())
    }

    pub fn with_exec(g: &Dgla, h: &Dgla, arity: usize, exec: Exec) -> Result<Self> {
        if arity == 0 || arity > 8 {
            return Err(Error::OutOfRange(format!("arity bound {arity}")));
        }
        let monomials = enumerate_monomials(g, arity);
        if monomials.len() * h.dim() > 4000 {
            return Err(Error::OutOfRange(format!(
                "Hom space of dimension {} exceeds the guard",
                monomials.len() * h.dim()
            )));
        }
        let mono_index: BTreeMap<Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mono_sd = |m: &Monomial| m.iter().map(|&a| sd(g, a)).sum::<i32>();
        let hs = h.space();
        let mut comps: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
        for (mi, m) in monomials.iter().enumerate() {
            for o in 0..h.dim() {
                comps.entry(hs.degree(o) - mono_sd(m)).or_default().push((mi, o));
            }
        }
        let basis: Vec<(usize, usize)> = comps.values().flatten().copied().collect();
        let labels = |&(mi, o): &(usize, usize)| {
            let args: Vec<&str> = monomials[mi].iter().map(|&a| g.space().label(a)).collect();
            format!("F[{}->{}]", args.join(","), hs.label(o))
        };
        let space = GradedSpace::new(comps.iter().map(|(d, v)| (*d, v.iter().map(labels).collect())).collect())?;
        let pos: BTreeMap<(usize, usize), usize> = basis.iter().enumerate().map(|(k, &p)| (p, k)).collect();

        let q1: Vec<MonoCombination> = monomials.iter().map(|m| coderivation(g, m, &mono_index, false)).collect();
        let q2: Vec<MonoCombination> = monomials.iter().map(|m| coderivation(g, m, &mono_index, true)).collect();
        // transposes: for each monomial, the monomials whose Q image hits it
        let transpose = |q: &[MonoCombination]| {
            let mut t: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); monomials.len()];
            for (src, comb) in q.iter().enumerate() {
                for (dst, c) in comb {
                    t[*dst].push((src, c.clone()));
                }
            }
            t
        };
        let (t1, t2) = (transpose(&q1), transpose(&q2));
        let n = basis.len();
        let image = |k: usize, with_dh: bool, t: &[Vec<(usize, Scalar)>]| -> Vector {
            let (mi, o) = basis[k];
            let mut out = linalg::zeros(n);
            if with_dh {
                for (u, c) in linalg::support(&h.d(&hs.unit(o))) {
                    out[pos[&(mi, u)]] += c;
                }
            }
            // -(-1)^{|f|} f∘Q
            let s = -scalar::sign(space.degree(k) as i64);
            for (src, c) in &t[mi] {
                out[pos[&(*src, o)]] += &s * c;
            }
            out
        };
        let d10_images: Vec<Vector> = par::range_map(exec, n, |k| image(k, true, &t1));
        let d01_images: Vec<Vector> = par::range_map(exec, n, |k| image(k, false, &t2));
        let d10 = GradedMap::from_images(space.clone(), space.clone(), 1, &d10_images)?;
        let d01 = GradedMap::from_images(space.clone(), space.clone(), 1, &d01_images)?;
        let d = d10.add(&d01)?;
        let complex = Complex::new(space.clone(), d)?;

        let degrees: Vec<Vec<i32>> = monomials.iter().map(|m| m.iter().map(|&a| sd(g, a)).collect()).collect();
        let dgla = Dgla::from_upper(complex, |x, y| {
            let (m1, o1) = basis[x];
            let (m2, o2) = basis[y];
            let (a, b) = (&monomials[m1], &monomials[m2]);
            if a.len() + b.len() > arity {
                return SparseVec::new();
            }
            let br = h.basis_bracket(o1, o2);
            if br.is_empty() {
                return SparseVec::new();
            }
            let mut merged: Monomial = a.iter().chain(b).copied().collect();
            merged.sort();
            let Some(&mi) = mono_index.get(&merged) else { return SparseVec::new() };
            let degs = &degrees[mi];
            let g_deg = space.degree(y) as i64;
            let sd_a: i64 = a.iter().map(|&i| sd(g, i) as i64).sum();
            let mut coeff = Scalar::zero();
            for s in koszul::subsets(merged.len(), a.len()) {
                let picked: Vec<usize> = s.iter().map(|&p| merged[p]).collect();
                if &picked != a {
                    continue;
                }
                coeff += koszul::unshuffle_sign(degs, &s);
            }
            if coeff.is_zero() {
                return SparseVec::new();
            }
            coeff *= scalar::sign(g_deg * sd_a);
            br.iter().map(|(u, c)| (pos[&(mi, *u)], &coeff * c)).collect()
        });
        Ok(Self { g: g.clone(), h: h.clone(), arity, monomials, mono_index, basis, pos, q1, q2, d10, d01, dgla })
    }

    pub fn dgla(&self) -> &Dgla {
        &self.dgla
    }

    pub fn source(&self) -> &Dgla {
        &self.g
    }

    pub fn target(&self) -> &Dgla {
        &self.h
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial_index(&self, m: &[usize]) -> Option<usize> {
        self.mono_index.get(m).copied()
    }

    pub fn position(&self, m: &[usize], o: usize) -> Option<usize> {
        self.mono_index.get(m).and_then(|&mi| self.pos.get(&(mi, o))).copied()
    }

    /// `(p, q)` of a basis element.
    pub fn bidegree(&self, k: usize) -> (i32, usize) {
        let (mi, o) = self.basis[k];
        let m = &self.monomials[mi];
        let p = self.h.space().degree(o) - m.iter().map(|&a| self.g.space().degree(a)).sum::<i32>();
        (p, m.len())
    }

    /// Dimensions of `Hom^{p,q}` for `1 <= q <= N`.
    pub fn bidegree_table(&self) -> BTreeMap<(i32, usize), usize> {
        let mut t = BTreeMap::new();
        for k in 0..self.dim() {
            *t.entry(self.bidegree(k)).or_insert(0) += 1;
        }
        t
    }

    /// Basis positions of bidegree `(p, q)`.
    pub fn positions_of(&self, p: i32, q: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.bidegree(k) == (p, q)).collect()
    }

    pub fn d10(&self, f: &[Scalar]) -> Vector {
        self.d10.apply(f)
    }

    pub fn d01(&self, f: &[Scalar]) -> Vector {
        self.d01.apply(f)
    }

    pub fn d(&self, f: &[Scalar]) -> Vector {
        self.dgla.d(f)
    }

    pub fn bracket(&self, f: &[Scalar], g: &[Scalar]) -> Vector {
        self.dgla.bracket(f, g)
    }

    /// Arity-`q` part of `f`.
    pub fn arity_part(&self, f: &[Scalar], q: usize) -> Vector {
        f.iter()
            .enumerate()
            .map(|(k, x)| if self.monomials[self.basis[k].0].len() == q { x.clone() } else { Scalar::zero() })
            .collect()
    }

    /// `f(m)` as an element of `h`.
    pub fn eval(&self, f: &[Scalar], m: &[usize]) -> Vector {
        let mut out = linalg::zeros(self.h.dim());
        if let Some(&mi) = self.mono_index.get(m) {
            for o in 0..self.h.dim() {
                out[o] = f[self.pos[&(mi, o)]].clone();
            }
        }
        out
    }

    /// The arity-1 element `s a ↦ φ(a)` for a linear map `φ: g -> h` of any degree.
    pub fn from_linear(&self, map: &GradedMap) -> Result<Vector> {
        if map.source() != self.g.space() || map.target() != self.h.space() {
            return Err(Error::Dimension("linear map does not match (g, h)".into()));
        }
        let mut out = linalg::zeros(self.dim());
        for a in 0..self.g.dim() {
            for (o, c) in linalg::support(&map.image(a)) {
                out[self.position(&[a], o).expect("arity-1 monomials exist")] = c.clone();
            }
        }
        Ok(out)
    }

    /// Arity-1 part as a linear map `g -> h` of degree `shift`.
    pub fn to_linear(&self, f: &[Scalar], shift: i32) -> Result<GradedMap> {
        let images: Vec<Vector> = (0..self.g.dim()).map(|a| self.eval(f, &[a])).collect();
        GradedMap::from_images(self.g.space().clone(), self.h.space().clone(), shift, &images)
    }

    /// The strict element of a degree-0 map, without checking that it is a dgla morphism.
    pub fn strict_element(&self, map: &GradedMap) -> Result<Vector> {
        if map.shift() != 0 {
            return Err(Error::Structural("strict morphisms have degree 0".into()));
        }
        self.from_linear(map)
    }

    /// `F_1 = φ`, `F_n = 0` for `n >= 2`; rejects invalid morphisms.
    pub fn strict_embed(&self, phi: &DglaMorphism) -> Result<LinfMorphism> {
        let report = phi.validate();
        if !report.is_valid() {
            return Err(Error::Precondition(format!(
                "not a dgla morphism: {:?} on {:?}",
                report.failures[0].check, report.failures[0].witness
            )));
        }
        self.extract_taylor(&self.strict_element(&phi.map)?)
    }

    /// Splits a degree-1 element into Taylor coefficients.
    pub fn extract_taylor(&self, pi: &[Scalar]) -> Result<LinfMorphism> {
        match self.dgla.space().homogeneity(pi) {
            Homogeneity::Zero | Homogeneity::Degree(1) => {}
            Homogeneity::Degree(d) => return Err(Error::WrongDegree { expected: 1, found: d.to_string() }),
            Homogeneity::Mixed => return Err(Error::WrongDegree { expected: 1, found: "mixed".into() }),
        }
        let mut out = LinfMorphism::zero(self.arity);
        for (k, c) in linalg::support(pi) {
            let (mi, o) = self.basis[k];
            let m = &self.monomials[mi];
            let e = out.taylor[m.len() - 1].entry(m.clone()).or_insert_with(|| linalg::zeros(self.h.dim()));
            e[o] = c.clone();
        }
        Ok(out)
    }

    /// Inverse of [`HomDgla::extract_taylor`].
    pub fn assemble(&self, f: &LinfMorphism) -> Result<Vector> {
        let mut out = linalg::zeros(self.dim());
        for (n, coeffs) in f.taylor.iter().enumerate().take(self.arity) {
            for (m, v) in coeffs {
                if m.len() != n + 1 {
                    return Err(Error::Structural(format!("monomial of arity {} filed under {}", m.len(), n + 1)));
                }
                for (o, c) in linalg::support(v) {
                    let k = self
                        .position(m, o)
                        .ok_or_else(|| Error::Structural(format!("monomial {m:?} is not in the Hom basis")))?;
                    out[k] = c.clone();
                }
            }
        }
        match self.dgla.space().homogeneity(&out) {
            Homogeneity::Zero | Homogeneity::Degree(1) => Ok(out),
            _ => Err(Error::WrongDegree { expected: 1, found: "Taylor family of the wrong degree".into() }),
        }
    }

    /// `Q(m)` applied to a monomial, by direct expansion (no transposed tables).
    fn apply_q(&self, m: &[usize]) -> MonoCombination {
        let Some(&mi) = self.mono_index.get(m) else { return Vec::new() };
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (k, c) in self.q1[mi].iter().chain(&self.q2[mi]) {
            *acc.entry(*k).or_insert_with(Scalar::zero) += c;
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Residuals of the L∞-morphism equations evaluated on every monomial of arity `1..=N`:
    /// `d_h F(m) + F(Q m) + ½ Σ_S ε(S) (-1)^{sd(m_S)} [F(m_S), F(m_{S^c})]`.
    pub fn linf_residual(&self, f: &LinfMorphism) -> Vec<BTreeMap<Monomial, Vector>> {
        let hd = self.h.dim();
        let half = scalar::frac(1, 2);
        let per_mono: Vec<(usize, Monomial, Vector)> = par::map(&self.monomials, |m| {
            let mut r = self.h.d(&f.eval(m, hd));
            for (k, c) in self.apply_q(m) {
                linalg::axpy(&mut r, &c, &f.eval(&self.monomials[k], hd));
            }
            let degs: Vec<i32> = m.iter().map(|&a| sd(&self.g, a)).collect();
            for p in 1..m.len() {
                for s in koszul::subsets(m.len(), p) {
                    let sc = koszul::complement(m.len(), &s);
                    let ms: Vec<usize> = s.iter().map(|&i| m[i]).collect();
                    let mc: Vec<usize> = sc.iter().map(|&i| m[i]).collect();
                    let sd_s: i64 = s.iter().map(|&i| degs[i] as i64).sum();
                    let c = koszul::unshuffle_sign(&degs, &s) * scalar::sign(sd_s) * &half;
                    let br = self.h.bracket(&f.eval(&ms, hd), &f.eval(&mc, hd));
                    linalg::axpy(&mut r, &c, &br);
                }
            }
            (m.len(), m.clone(), r)
        });
        let mut out = vec![BTreeMap::new(); self.arity];
        for (n, m, r) in per_mono {
            if !linalg::is_zero(&r) {
                out[n - 1].insert(m, r);
            }
        }
        out
    }

    /// Residual of `D π + ½[π, π]` regrouped by monomial, for comparison with [`HomDgla::linf_residual`].
    pub fn mc_residual_by_monomial(&self, pi: &[Scalar]) -> Result<Vec<BTreeMap<Monomial, Vector>>> {
        let r = crate::mc::mc_residue(&self.dgla, pi)?;
        let mut out = vec![BTreeMap::new(); self.arity];
        for (k, c) in linalg::support(&r) {
            let (mi, o) = self.basis[k];
            let m = &self.monomials[mi];
            let e: &mut Vector = out[m.len() - 1].entry(m.clone()).or_insert_with(|| linalg::zeros(self.h.dim()));
            e[o] = c.clone();
        }
        Ok(out)
    }

    /// Direct evaluation of `[f, g]` on the monomial `sa·sb`, for arity-1 `f` and homogeneous `g`.
    pub fn bracket_on_pair(&self, f: &[Scalar], g: &[Scalar], a: usize, b: usize) -> Vector {
        let m = {
            let mut m = vec![a, b];
            m.sort();
            m
        };
        let degs: Vec<i32> = m.iter().map(|&x| sd(&self.g, x)).collect();
        if a == b && degs[0].rem_euclid(2) == 1 {
            return linalg::zeros(self.h.dim());
        }
        let deg_g = match self.dgla.space().homogeneity(g) {
            Homogeneity::Degree(d) => d as i64,
            _ => 0,
        };
        let mut out = linalg::zeros(self.h.dim());
        for s in [vec![0usize], vec![1usize]] {
            let sc = koszul::complement(2, &s);
            let c = koszul::unshuffle_sign(&degs, &s) * scalar::sign(deg_g * degs[s[0]] as i64);
            let br = self.h.bracket(&self.eval(f, &[m[s[0]]]), &self.eval(g, &[m[sc[0]]]));
            linalg::axpy(&mut out, &c, &br);
        }
        out
    }
}

/// `Q1` (if `!quadratic`) or `Q2` applied to the monomial `m`.
fn coderivation(g: &Dgla, m: &[usize], index: &BTreeMap<Monomial, usize>, quadratic: bool) -> MonoCombination {
    let gs = g.space();
    let degs: Vec<i32> = m.iter().map(|&a| sd(g, a)).collect();
    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
    let push = |items: Vec<(usize, i32)>, c: Scalar, acc: &mut BTreeMap<usize, Scalar>| {
        let mut items = items;
        if let Some(sign) = koszul::sort_with_sign(&mut items) {
            let key: Monomial = items.iter().map(|x| x.0).collect();
            if let Some(&k) = index.get(&key) {
                *acc.entry(k).or_insert_with(Scalar::zero) += sign * c;
            }
        }
    };
    if !quadratic {
        let mut before = 0i64;
        for i in 0..m.len() {
            let dv = g.d(&gs.unit(m[i]));
            for (w, c) in linalg::support(&dv) {
                let mut items: Vec<(usize, i32)> = m.iter().zip(&degs).map(|(&a, &d)| (a, d)).collect();
                items[i] = (w, sd(g, w));
                push(items, -(scalar::sign(before) * c), &mut acc);
            }
            before += degs[i] as i64;
        }
    } else {
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let s = koszul::unshuffle_sign(&degs, &[i, j]) * scalar::sign(gs.degree(m[i]) as i64);
                let br = g.bracket(&gs.unit(m[i]), &gs.unit(m[j]));
                for (w, c) in linalg::support(&br) {
                    let mut items = vec![(w, sd(g, w))];
                    items.extend((0..m.len()).filter(|&k| k != i && k != j).map(|k| (m[k], degs[k])));
                    push(items, &s * c, &mut acc);
                }
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}
