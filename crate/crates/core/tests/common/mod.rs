#![allow(dead_code)]

use deforma::artin::ArtinAlgebra;
use deforma::complex::Complex;
use deforma::dgla::Dgla;
use deforma::fixtures;
use deforma::model::Model;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn load(name: &str) -> Model {
    fixtures::load(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every dgla of every bundled fixture, as `("fixture/dgla", dgla)`.
pub fn fixture_dglas() -> Vec<(String, Dgla)> {
    fixtures::names().flat_map(|n| load(n).dglas.into_iter().map(move |(g, d)| (format!("{n}/{g}"), d))).collect()
}

/// Every complex underlying a fixture dgla or declared on its own.
pub fn fixture_complexes() -> Vec<(String, Complex)> {
    let mut out: Vec<(String, Complex)> = fixture_dglas().into_iter().map(|(n, d)| (n, d.complex().clone())).collect();
    for n in fixtures::names() {
        out.extend(load(n).complexes.into_iter().map(|(c, x)| (format!("{n}/{c}"), x)));
    }
    out
}

/// `K[ε]/(ε²)`, `K[ε]/(ε³)`, `K[ε1, ε2]/(ε1, ε2)²`.
pub fn small_algebras() -> Vec<ArtinAlgebra> {
    [(1, 2), (1, 3), (2, 2)].into_iter().map(|(k, n)| ArtinAlgebra::truncated_polynomial(k, n).unwrap()).collect()
}
