//! Seeded random inputs for property checks: small rationals, homogeneous elements,
//! gauge parameters and Maurer-Cartan elements of `g ⊗ m_A`.

use rand::Rng;

use crate::artin::NilpotentDgla;
use crate::complex::{Cohomology, Complex};
use crate::convolution::HomDgla;
use crate::error::Result;
use crate::graded::GradedSpace;
use crate::linalg::{self, Vector};
use crate::mc;
use crate::scalar::{self, Scalar};

/// Numerator in `-3..=3`, denominator in `1..=3`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Scalar {
    scalar::frac(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

/// A random element of degree `deg`; each coordinate is nonzero with probability `density`.
pub fn homogeneous<R: Rng>(rng: &mut R, space: &GradedSpace, deg: i32, density: f64) -> Vector {
    let mut v = linalg::zeros(space.dim());
    for k in space.range(deg).into_iter().flatten() {
        if rng.gen_bool(density) {
            v[k] = small_rational(rng);
        }
    }
    v
}

/// Random combination of the given vectors.
pub fn combination<R: Rng>(rng: &mut R, dim: usize, vectors: &[Vector]) -> Vector {
    let mut out = linalg::zeros(dim);
    for v in vectors {
        linalg::axpy(&mut out, &small_rational(rng), v);
    }
    out
}

/// A degree-0 element of `g ⊗ m_A`.
pub fn gauge_parameter<R: Rng>(rng: &mut R, host: &NilpotentDgla) -> Vector {
    homogeneous(rng, host.dgla().space(), 0, 0.5)
}

/// A Maurer-Cartan element of `g ⊗ m_A`: a random first-order cocycle extended through
/// all orders, falling back to cocycles on top-weight monomials when obstructed, then
/// moved by a random gauge.
pub fn mc_element<R: Rng>(rng: &mut R, host: &NilpotentDgla, h2: &Cohomology) -> Result<Vector> {
    let g = host.base();
    let cocycles = cocycles(g.complex(), 1);
    let alg = host.algebra();
    let mut first = linalg::zeros(host.dgla().dim());
    for mono in host.monomials_of_weight(1) {
        let z = combination(rng, g.dim(), &cocycles);
        first = linalg::add(&first, &host.embed(&z, mono));
    }
    let run = mc::extend_all(host, h2, &first)?;
    let base = if run.obstruction.is_none() {
        run.solution
    } else {
        let mut x = linalg::zeros(host.dgla().dim());
        for mono in host.monomials_of_weight(alg.max_weight()) {
            let z = combination(rng, g.dim(), &cocycles);
            x = linalg::add(&x, &host.embed(&z, mono));
        }
        x
    };
    let alpha = gauge_parameter(rng, host);
    mc::gauge_act(host.dgla(), &alpha, &base)
}

/// A basis of degree-`deg` cocycles, as global vectors.
pub fn cocycles(c: &Complex, deg: i32) -> Vec<Vector> {
    let s = c.space();
    if s.dim_in(deg) == 0 {
        return Vec::new();
    }
    c.differential().block(deg).nullspace().into_iter().map(|v| s.embed(deg, &v)).collect()
}

/// A random element of the convolution dgla of total degree `deg`, arity at most `max_arity`.
pub fn hom_element<R: Rng>(rng: &mut R, hom: &HomDgla, deg: i32, max_arity: usize, density: f64) -> Vector {
    let s = hom.dgla().space();
    let mut v = linalg::zeros(s.dim());
    for k in s.range(deg).into_iter().flatten() {
        if hom.bidegree(k).1 <= max_arity && rng.gen_bool(density) {
            v[k] = small_rational(rng);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin::{tensor_nilpotent, ArtinAlgebra};
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_mc_elements_solve_the_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = fixtures::load("obstructed").unwrap().dgla("g").unwrap().clone();
        let h2 = g.complex().cohomology();
        for (k, n) in [(1, 2), (1, 3), (2, 2)] {
            let host = tensor_nilpotent(&g, &ArtinAlgebra::truncated_polynomial(k, n).unwrap()).unwrap();
            for _ in 0..5 {
                let x = mc_element(&mut rng, &host, &h2).unwrap();
                assert!(mc::is_mc(host.dgla(), &x).unwrap());
            }
        }
    }
}
