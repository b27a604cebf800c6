//! Word-level kernels shared by the truth-table, ANF and restriction code.
//!
//! Bit `i` of a table is stored at bit `i % 64` of word `i / 64`. Tables on
//! fewer than six variables use the low `2^m` bits of a single word and keep
//! the remaining bits clear.

/// `VAR_MASKS[j]` selects the in-word positions whose index has bit `j` set.
pub(crate) const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// `WEIGHT_MASKS[d]` selects in-word positions `b < 64` with `popcount(b) == d`.
pub(crate) const WEIGHT_MASKS: [u64; 7] = weight_masks();

const fn weight_masks() -> [u64; 7] {
    let mut out = [0u64; 7];
    let mut b = 0;
    while b < 64 {
        out[(b as u64).count_ones() as usize] |= 1u64 << b;
        b += 1;
    }
    out
}

/// Number of 64-bit words backing a table on `m` variables.
#[inline]
pub(crate) fn word_count(m: usize) -> usize {
    if m <= 6 {
        1
    } else {
        1 << (m - 6)
    }
}

/// Mask of the valid bits in each word of a table on `m` variables.
#[inline]
pub(crate) fn word_mask(m: usize) -> u64 {
    if m >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << m)) - 1
    }
}

/// In-place binary Möbius transform of a single word holding `2^m <= 64` bits.
///
/// Self-inverse: it maps a truth table to its ANF and back.
#[inline]
pub(crate) fn moebius_word(mut w: u64, m: usize) -> u64 {
    for (j, mask) in VAR_MASKS.iter().enumerate().take(m.min(6)) {
        w ^= (w << (1 << j)) & mask;
    }
    w
}

/// In-place binary Möbius transform over a multi-word table.
pub(crate) fn moebius_words(words: &mut [u64], m: usize) {
    for w in words.iter_mut() {
        *w = moebius_word(*w, m);
    }
    for j in 6..m {
        let stride = 1usize << (j - 6);
        for block in (0..words.len()).step_by(2 * stride) {
            for i in block..block + stride {
                words[i + stride] ^= words[i];
            }
        }
    }
}

/// Largest Hamming weight among the set positions of a single ANF word.
/// Returns `None` for the zero word.
#[inline]
pub(crate) fn max_weight_word(w: u64) -> Option<u32> {
    (0..7)
        .rev()
        .find(|&d| w & WEIGHT_MASKS[d] != 0)
        .map(|d| d as u32)
}

/// Smallest Hamming weight among the set positions of a single ANF word.
#[inline]
pub(crate) fn min_weight_word(w: u64) -> Option<u32> {
    (0..7).find(|&d| w & WEIGHT_MASKS[d] != 0).map(|d| d as u32)
}

/// Degree of a function on `r <= 6` variables given by its truth-table word.
#[inline]
pub(crate) fn window_degree(window: u64, r: usize) -> u32 {
    max_weight_word(moebius_word(window, r)).unwrap_or(0)
}

/// Table of `x -> f(x ^ (1 << j))` for a single word, `j < 6`.
#[inline]
pub(crate) fn flip_var_word(w: u64, j: usize) -> u64 {
    let s = 1 << j;
    ((w & VAR_MASKS[j]) >> s) | ((w << s) & VAR_MASKS[j])
}

#[inline]
pub(crate) fn bit(words: &[u64], p: u32) -> u64 {
    (words[(p >> 6) as usize] >> (p & 63)) & 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_masks_partition_word() {
        let total = WEIGHT_MASKS.iter().fold(0u64, |acc, m| {
            assert_eq!(acc & m, 0);
            acc | m
        });
        assert_eq!(total, u64::MAX);
        assert_eq!(WEIGHT_MASKS[0], 1);
        assert_eq!(WEIGHT_MASKS[6], 1 << 63);
    }

    #[test]
    fn moebius_word_involution() {
        for m in 0..=6 {
            let mask = word_mask(m);
            for seed in 0..50u64 {
                let w = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) & mask;
                assert_eq!(moebius_word(moebius_word(w, m), m), w);
            }
        }
    }

    #[test]
    fn flip_var_matches_definition() {
        let w = 0x0123_4567_89AB_CDEFu64;
        for j in 0..6 {
            let flipped = flip_var_word(w, j);
            for x in 0..64u32 {
                assert_eq!((flipped >> x) & 1, (w >> (x ^ (1 << j))) & 1);
            }
        }
    }
}
