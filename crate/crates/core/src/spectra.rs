//! Walsh–Hadamard spectra, bentness and bent duals.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolfun::{random_function, BoolFun};
use crate::error::{Error, Result};

/// `W_f(u) = sum_x (-1)^(f(x) + u.x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    pub m: usize,
    pub values: Vec<i32>,
}

impl WalshSpectrum {
    /// Value -> multiplicity.
    pub fn multiplicities(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for &v in &self.values {
            *out.entry(v).or_insert(0) += 1;
        }
        out
    }

    pub fn sum_of_squares(&self) -> i64 {
        self.values
            .iter()
            .map(|&v| i64::from(v) * i64::from(v))
            .sum()
    }
}

/// Fast Walsh–Hadamard transform in `O(m 2^m)`.
pub fn walsh_transform(f: &BoolFun) -> WalshSpectrum {
    let n = 1usize << f.m();
    let mut values: Vec<i32> = (0..n as u32)
        .map(|x| if f.get(x) { -1 } else { 1 })
        .collect();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
    WalshSpectrum { m: f.m(), values }
}

fn check_even(f: &BoolFun) -> Result<()> {
    if f.m() % 2 == 1 {
        return Err(Error::OddDimension(f.m()));
    }
    Ok(())
}

/// `|W_f(u)| = 2^(m/2)` for every `u`.
pub fn is_bent(f: &BoolFun) -> Result<bool> {
    check_even(f)?;
    let target = 1i32 << (f.m() / 2);
    Ok(walsh_transform(f).values.iter().all(|v| v.abs() == target))
}

/// The dual `g` with `(-1)^g(u) = W_f(u) / 2^(m/2)`.
pub fn dual_bent(f: &BoolFun) -> Result<BoolFun> {
    check_even(f)?;
    let target = 1i32 << (f.m() / 2);
    let spectrum = walsh_transform(f);
    if spectrum.values.iter().any(|v| v.abs() != target) {
        return Err(Error::NotBent);
    }
    BoolFun::from_fn(f.m(), |u| spectrum.values[u as usize] < 0)
}

/// Random Maiorana–McFarland bent function `f(x, y) = x.pi(y) + g(y)` on
/// `2n` variables, with `x` the low `n` coordinates and `y` the high ones.
pub fn maiorana_mcfarland<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BoolFun> {
    if n == 0 || 2 * n > crate::boolfun::MAX_VARS {
        return Err(Error::VariableCount(2 * n));
    }
    let mut pi: Vec<u32> = (0..1u32 << n).collect();
    pi.shuffle(rng);
    let g = random_function(n, rng)?;
    let low = (1u32 << n) - 1;
    BoolFun::from_fn(2 * n, |z| {
        let (x, y) = (z & low, z >> n);
        ((x & pi[y as usize]).count_ones() & 1 == 1) ^ g.get(y)
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::boolfun::Anf;

    fn tt(text: &str, m: usize) -> BoolFun {
        Anf::parse(text, m).unwrap().truth_table()
    }

    fn direct_walsh(f: &BoolFun, u: u32) -> i32 {
        (0..1u32 << f.m())
            .map(|x| {
                if f.get(x) ^ ((x & u).count_ones() & 1 == 1) {
                    -1
                } else {
                    1
                }
            })
            .sum()
    }

    #[test]
    fn zero_function_spectrum() {
        let w = walsh_transform(&BoolFun::zero(2).unwrap());
        assert_eq!(w.values, [4, 0, 0, 0]);
    }

    #[test]
    fn x1x2_spectrum_matches_direct_sum() {
        let f = tt("x1*x2", 2);
        let w = walsh_transform(&f);
        for u in 0..4 {
            assert_eq!(w.values[u as usize], direct_walsh(&f, u));
            assert_eq!(w.values[u as usize].abs(), 2);
        }
        assert_eq!(w.values, [2, 2, 2, -2]);
        assert!(is_bent(&f).unwrap());
        assert_eq!(dual_bent(&f).unwrap(), f);
    }

    #[test]
    fn bentness_examples() {
        assert!(is_bent(&tt("x1*x2 + x3*x4 + x5*x6 + x7*x8", 8)).unwrap());
        assert!(!is_bent(&tt("x1", 2)).unwrap());
        assert!(matches!(is_bent(&tt("x1", 3)), Err(Error::OddDimension(3))));
        assert!(matches!(dual_bent(&tt("x1", 2)), Err(Error::NotBent)));
    }

    #[test]
    fn maiorana_mcfarland_is_bent_with_involutive_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            for _ in 0..10 {
                let f = maiorana_mcfarland(n, &mut rng).unwrap();
                assert!(is_bent(&f).unwrap());
                let d = dual_bent(&f).unwrap();
                assert!(is_bent(&d).unwrap());
                assert_eq!(dual_bent(&d).unwrap(), f);
                assert!(f.degree() as usize <= n.max(2));
            }
        }
    }

    #[test]
    fn random_spectrum_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_function(6, &mut rng).unwrap();
        let w = walsh_transform(&f);
        for u in 0..64 {
            assert_eq!(w.values[u as usize], direct_walsh(&f, u));
        }
        assert_eq!(w.values[0], 64 - 2 * f.weight() as i32);
        assert_eq!(w.multiplicities().values().sum::<usize>(), 64);
    }
}
