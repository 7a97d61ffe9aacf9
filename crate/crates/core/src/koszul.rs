//! Koszul signs for graded-symmetric monomials and unshuffles.
//!
//! A monomial is a nondecreasing list of basis indices; each index carries a
//! (shifted) degree. Swapping neighbours of degrees `a`, `b` costs `(-1)^{ab}`,
//! and a monomial with a repeated odd element vanishes.

use crate::scalar::{self, Scalar};

fn odd(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

/// Sorts `(index, degree)` pairs by index, returning the Koszul sign of the permutation,
/// or `None` if an odd element repeats.
pub fn sort_with_sign(items: &mut [(usize, i32)]) -> Option<Scalar> {
    let mut flips = 0i64;
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && items[j - 1].0 > items[j].0 {
            if odd(items[j - 1].1) && odd(items[j].1) {
                flips += 1;
            }
            items.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in items.windows(2) {
        if w[0].0 == w[1].0 && odd(w[0].1) {
            return None;
        }
    }
    Some(scalar::sign(flips))
}

/// Position subsets `S ⊆ {0..n}` of size `p`, each sorted.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for k in start..n {
            if n - k < p - cur.len() {
                break;
            }
            cur.push(k);
            go(k + 1, n, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, p, &mut Vec::new(), &mut out);
    out
}

/// Sign of moving the elements at positions `s` (in order) in front of the rest.
pub fn unshuffle_sign(degrees: &[i32], s: &[usize]) -> Scalar {
    let mut flips = 0i64;
    for (rank, &pos) in s.iter().enumerate() {
        // elements of the complement standing before `pos`
        for c in 0..pos {
            if !s[..rank].contains(&c) && odd(degrees[c]) && odd(degrees[pos]) {
                flips += 1;
            }
        }
    }
    scalar::sign(flips)
}

/// Complement of a sorted position subset.
pub fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|k| !s.contains(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorting_signs() {
        let mut v = vec![(2, 1), (1, 1)];
        assert_eq!(sort_with_sign(&mut v), Some(scalar::int(-1)));
        assert_eq!(v, vec![(1, 1), (2, 1)]);
        let mut w = vec![(2, 0), (1, 1)];
        assert_eq!(sort_with_sign(&mut w), Some(scalar::one()));
        let mut z = vec![(1, 1), (0, 2), (1, 1)];
        assert_eq!(sort_with_sign(&mut z), None);
        let mut e = vec![(1, 2), (1, 2)];
        assert_eq!(sort_with_sign(&mut e), Some(scalar::one()));
    }

    #[test]
    fn unshuffles() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        // moving position 2 in front of two odd elements: +1; in front of one: -1
        assert_eq!(unshuffle_sign(&[1, 1, 1], &[2]), scalar::one());
        assert_eq!(unshuffle_sign(&[1, 0, 1], &[2]), scalar::int(-1));
        assert_eq!(unshuffle_sign(&[1, 1, 1], &[0, 2]), scalar::int(-1));
        assert_eq!(complement(4, &[1, 3]), vec![0, 2]);
    }
}
