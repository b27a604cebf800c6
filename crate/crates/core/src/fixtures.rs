//! Named functions with known normality behaviour.

use crate::boolfun::{Anf, BoolFun};

/// Degree-6 function on 8 variables, weakly normal but not normal.
pub const DUBUC_ANF: &str = "x2*x3*x4*x5*x7*x8 + x2*x3*x4*x5*x8 + x2*x3*x4*x7*x8 \
    + x2*x3*x4*x6 + x2*x3*x5*x6 + x2*x3*x4*x8 + x2*x4*x6*x8 + x2*x5*x7*x8 \
    + x1*x2*x3 + x3*x4*x5 + x2*x5*x6 + x2*x4*x7 + x3*x4*x7 + x4*x5*x8 \
    + x3*x6*x8 + x3*x7*x8 + x2*x3 + x2*x5 + x3*x5 + x4*x6 + x2*x7 + x3*x8 \
    + x7*x8 + x1 + x2";

/// Degree-6 function on 7 variables with `deg_6 = 5`.
pub const H_ANF: &str = "x1*x2*x3*x4*x5*x6 + x2*x3*x4*x5*x7 + x1*x3*x4*x6*x7 + x1*x2*x5*x6*x7";

pub fn dubuc() -> BoolFun {
    Anf::parse(DUBUC_ANF, 8)
        .expect("valid fixture")
        .truth_table()
}

pub fn h7() -> BoolFun {
    Anf::parse(H_ANF, 7).expect("valid fixture").truth_table()
}

/// `x_1 x_{t+1} + ... + x_t x_{2t} + x_{2t+1}` on `2t + 1` variables: weakly
/// normal, not normal.
pub fn odd_quadric(t: usize) -> BoolFun {
    let m = 2 * t + 1;
    let masks = (0..t)
        .map(|i| (1u32 << i) | (1 << (t + i)))
        .chain([1 << (2 * t)]);
    Anf::from_monomials(m, masks).expect("t <= 7").truth_table()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        let d = dubuc();
        assert_eq!(d.anf().term_count(), 25);
        assert_eq!(d.degree(), 6);
        assert_eq!(h7().degree(), 6);
        assert_eq!(
            odd_quadric(2).anf(),
            Anf::parse("x1*x3 + x2*x4 + x5", 5).unwrap()
        );
        assert_eq!(
            odd_quadric(3).anf(),
            Anf::parse("x1*x4 + x2*x5 + x3*x6 + x7", 7).unwrap()
        );
    }
}
