//! The extended affine action `f -> f(Ax + b) + c.x + d`.

use rand::Rng;

use crate::boolfun::BoolFun;
use crate::error::{Error, Result};

/// An element of the extended affine group acting on `B(m)`.
///
/// The matrix is stored by columns: `A x` is the XOR of the columns selected
/// by the bits of `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineTransform {
    m: usize,
    columns: Vec<u32>,
    translation: u32,
    linear_out: u32,
    constant_out: bool,
}

/// Rank of a set of vectors over F_2.
pub(crate) fn rank(vectors: &[u32]) -> usize {
    let mut rows: Vec<u32> = vectors.to_vec();
    let mut rank = 0;
    for bit in (0..32).rev() {
        let pivot = 1u32 << bit;
        if let Some(i) = (rank..rows.len()).find(|&i| rows[i] & pivot != 0) {
            rows.swap(rank, i);
            let p = rows[rank];
            for row in rows.iter_mut().skip(rank + 1) {
                if *row & pivot != 0 {
                    *row ^= p;
                }
            }
            rank += 1;
        }
    }
    rank
}

#[inline]
fn dot(a: u32, b: u32) -> bool {
    (a & b).count_ones() & 1 == 1
}

impl AffineTransform {
    pub fn new(
        m: usize,
        columns: Vec<u32>,
        translation: u32,
        linear_out: u32,
        constant_out: bool,
    ) -> Result<Self> {
        BoolFun::zero(m)?;
        let limit = 1u32 << m;
        if columns.len() != m || columns.iter().any(|&c| c >= limit) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: columns.len(),
            });
        }
        if translation >= limit || linear_out >= limit {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: 32 - translation.max(linear_out).leading_zeros() as usize,
            });
        }
        if rank(&columns) != m {
            return Err(Error::SingularMatrix);
        }
        Ok(Self {
            m,
            columns,
            translation,
            linear_out,
            constant_out,
        })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::new(m, (0..m).map(|j| 1 << j).collect(), 0, 0, false)
    }

    /// Uniformly random invertible matrix with random translation and output
    /// affine part.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        Self::random_with_output(m, true, rng)
    }

    /// As [`random`](Self::random), optionally with `c = 0, d = 0`.
    pub fn random_with_output<R: Rng + ?Sized>(
        m: usize,
        with_output: bool,
        rng: &mut R,
    ) -> Result<Self> {
        BoolFun::zero(m)?;
        let mask = (1u32 << m) - 1;
        let columns = loop {
            let cols: Vec<u32> = (0..m).map(|_| rng.gen::<u32>() & mask).collect();
            if rank(&cols) == m {
                break cols;
            }
        };
        let (c, d) = if with_output {
            (rng.gen::<u32>() & mask, rng.gen())
        } else {
            (0, false)
        };
        Self::new(m, columns, rng.gen::<u32>() & mask, c, d)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `A x + b`.
    #[inline]
    pub fn map_point(&self, x: u32) -> u32 {
        self.linear(x) ^ self.translation
    }

    #[inline]
    fn linear(&self, x: u32) -> u32 {
        self.columns
            .iter()
            .enumerate()
            .filter(|&(j, _)| (x >> j) & 1 == 1)
            .fold(0, |acc, (_, &c)| acc ^ c)
    }

    /// `A^T v`.
    fn transpose_apply(&self, v: u32) -> u32 {
        self.columns
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &c)| acc | (u32::from(dot(c, v)) << j))
    }

    /// The transform equal to applying `self` first and `second` afterwards:
    /// `apply(apply(f, self), second) == apply(f, self.then(second))`.
    pub fn then(&self, second: &AffineTransform) -> Result<Self> {
        if self.m != second.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: second.m,
            });
        }
        let columns = second.columns.iter().map(|&c| self.linear(c)).collect();
        Self::new(
            self.m,
            columns,
            self.map_point(second.translation),
            second.transpose_apply(self.linear_out) ^ second.linear_out,
            self.constant_out ^ second.constant_out ^ dot(self.linear_out, second.translation),
        )
    }

    /// `x -> f(Ax + b) + c.x + d`.
    pub fn apply(&self, f: &BoolFun) -> Result<BoolFun> {
        if f.m() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: f.m(),
            });
        }
        BoolFun::from_fn(self.m, |x| {
            f.get(self.map_point(x)) ^ dot(self.linear_out, x) ^ self.constant_out
        })
    }
}

/// `x -> f(Ax + b) + c.x + d` for `g = (A, b, c, d)`.
pub fn apply_affine(f: &BoolFun, g: &AffineTransform) -> Result<BoolFun> {
    g.apply(f)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::boolfun::{random_function, Anf};

    #[test]
    fn singular_matrix_rejected() {
        assert!(matches!(
            AffineTransform::new(3, vec![1, 2, 3], 0, 0, false),
            Err(Error::SingularMatrix)
        ));
        assert!(AffineTransform::new(3, vec![1, 2], 0, 0, false).is_err());
    }

    #[test]
    fn identity_leaves_function_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_function(7, &mut rng).unwrap();
        assert_eq!(
            apply_affine(&f, &AffineTransform::identity(7).unwrap()).unwrap(),
            f
        );
    }

    #[test]
    fn translation_shifts_points() {
        let f = Anf::parse("x1*x2", 2).unwrap().truth_table();
        let g = AffineTransform::new(2, vec![1, 2], 0b01, 0, false).unwrap();
        // (x1 + 1) x2
        assert_eq!(
            g.apply(&f).unwrap().anf(),
            Anf::parse("x1*x2 + x2", 2).unwrap()
        );
    }

    #[test]
    fn composition_is_group_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..=7 {
            for _ in 0..20 {
                let f = random_function(m, &mut rng).unwrap();
                let g1 = AffineTransform::random(m, &mut rng).unwrap();
                let g2 = AffineTransform::random(m, &mut rng).unwrap();
                let lhs = g2.apply(&g1.apply(&f).unwrap()).unwrap();
                let rhs = g1.then(&g2).unwrap().apply(&f).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
