#![allow(dead_code)]

use bfnorm::BoolFun;
use num_bigint::BigUint;

/// Number of r-dimensional subspaces of F_2^m from the product formula.
pub fn gaussian_big(m: u32, r: u32) -> BigUint {
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    let one = BigUint::from(1u32);
    for i in 0..r {
        num *= (BigUint::from(1u32) << (m - i)) - &one;
        den *= (BigUint::from(1u32) << (i + 1)) - &one;
    }
    num / den
}

/// Degree of the function `values` on `2^n` points, by the quadratic
/// subset-sum definition of the ANF.
pub fn slow_degree(values: &[bool]) -> u32 {
    let mut deg = 0;
    for s in 0..values.len() {
        let mut coeff = false;
        let mut t = s;
        loop {
            coeff ^= values[t];
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
        if coeff {
            deg = deg.max(s.count_ones());
        }
    }
    deg
}

/// Values of `f` on `a + span(basis)`, indexed by the coordinate vector.
pub fn restrict_values(f: &BoolFun, a: u32, basis: &[u32]) -> Vec<bool> {
    (0..1u32 << basis.len())
        .map(|y| {
            let p = basis
                .iter()
                .enumerate()
                .filter(|&(j, _)| (y >> j) & 1 == 1)
                .fold(a, |acc, (_, &b)| acc ^ b);
            f.get(p)
        })
        .collect()
}

pub fn f2_rank(vectors: &[u32]) -> usize {
    let mut rows = vectors.to_vec();
    let mut rank = 0;
    for bit in (0..32).rev() {
        if let Some(i) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
            rows.swap(rank, i);
            let p = rows[rank];
            for row in rows.iter_mut().skip(rank + 1) {
                if *row >> bit & 1 == 1 {
                    *row ^= p;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Minimum degree of `f` over all r-flats, enumerating every ordered
/// independent r-tuple of vectors and every translation. Tiny m only.
pub fn brute_r_degree(f: &BoolFun, r: usize) -> u32 {
    let m = f.m();
    let n = 1u32 << m;
    let mut best = u32::MAX;
    let mut basis = Vec::with_capacity(r);
    fn rec(f: &BoolFun, r: usize, n: u32, start: u32, basis: &mut Vec<u32>, best: &mut u32) {
        if basis.len() == r {
            for a in 0..n {
                let d = slow_degree(&restrict_values(f, a, basis));
                *best = (*best).min(d);
            }
            return;
        }
        for v in start..n {
            basis.push(v);
            if f2_rank(basis) == basis.len() {
                rec(f, r, n, v + 1, basis, best);
            }
            basis.pop();
        }
    }
    rec(f, r, n, 1, &mut basis, &mut best);
    best
}
