//! Truth tables, algebraic normal forms and degree bands.
//!
//! A point `x = (x_1, ..., x_m)` is identified with the index
//! `x_1 + 2 x_2 + ... + 2^(m-1) x_m`. The same bijection maps a monomial
//! `x_S` to the mask `sum_{s in S} 2^(s-1)`, so the Möbius transform between
//! a truth table and its ANF is one in-place butterfly.

use std::fmt;
use std::ops::BitXor;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits;
use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 16;

fn check_vars(m: usize) -> Result<()> {
    if (1..=MAX_VARS).contains(&m) {
        Ok(())
    } else {
        Err(Error::VariableCount(m))
    }
}

/// A Boolean function `F_2^m -> F_2` stored as its truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolFun {
    m: usize,
    words: Vec<u64>,
}

impl BoolFun {
    /// The null function on `m` variables.
    pub fn zero(m: usize) -> Result<Self> {
        check_vars(m)?;
        Ok(Self {
            m,
            words: vec![0; bits::word_count(m)],
        })
    }

    /// The constant function `1`.
    pub fn one(m: usize) -> Result<Self> {
        let mut f = Self::zero(m)?;
        let mask = bits::word_mask(m);
        f.words.iter_mut().for_each(|w| *w = mask);
        Ok(f)
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(u32) -> bool) -> Result<Self> {
        let mut out = Self::zero(m)?;
        for x in 0..(1u32 << m) {
            if f(x) {
                out.words[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(out)
    }

    /// Builds a function from packed table words; bits beyond `2^m` must be clear.
    pub fn from_words(m: usize, words: Vec<u64>) -> Result<Self> {
        check_vars(m)?;
        let expected = bits::word_count(m);
        if words.len() != expected {
            return Err(Error::TableLength {
                expected: 1 << m,
                got: words.len() * 64,
            });
        }
        if words[0] & !bits::word_mask(m) != 0 {
            return Err(Error::TableLength {
                expected: 1 << m,
                got: 64 - words[0].leading_zeros() as usize,
            });
        }
        Ok(Self { m, words })
    }

    /// Unchecked constructor; also admits `m = 0` for restrictions to points.
    pub(crate) fn from_raw(m: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), bits::word_count(m));
        Self { m, words }
    }

    pub fn from_bits(m: usize, table: &[bool]) -> Result<Self> {
        check_vars(m)?;
        if table.len() != 1 << m {
            return Err(Error::TableLength {
                expected: 1 << m,
                got: table.len(),
            });
        }
        Self::from_fn(m, |x| table[x as usize])
    }

    /// Number of variables.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Value at the point with index `x`.
    #[inline]
    pub fn get(&self, x: u32) -> bool {
        bits::bit(&self.words, x) != 0
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_constant(&self) -> bool {
        let mask = bits::word_mask(self.m);
        self.is_zero() || self.words.iter().all(|&w| w == mask)
    }

    /// Algebraic normal form (Möbius transform).
    pub fn anf(&self) -> Anf {
        let mut coeffs = self.words.clone();
        bits::moebius_words(&mut coeffs, self.m);
        Anf { m: self.m, coeffs }
    }

    /// Algebraic degree; 0 for constant functions.
    pub fn degree(&self) -> u32 {
        self.anf().degree()
    }

    /// Smallest monomial size in the ANF.
    pub fn valuation(&self) -> Result<u32> {
        self.anf().valuation()
    }

    /// Truth table as lowercase hex; byte `j` holds bits `8j..8j+7`, least
    /// significant bit first.
    pub fn to_hex(&self) -> String {
        let nbytes = ((1usize << self.m) / 8).max(1);
        let mut out = String::with_capacity(2 * nbytes);
        for j in 0..nbytes {
            let byte = (self.words[j / 8] >> (8 * (j % 8))) & 0xff;
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(text: &str, m: usize) -> Result<Self> {
        check_vars(m)?;
        let text = text.trim();
        let nbytes = ((1usize << m) / 8).max(1);
        if text.len() != 2 * nbytes {
            return Err(Error::TableLength {
                expected: 1 << m,
                got: text.len() * 4,
            });
        }
        let mut words = vec![0u64; bits::word_count(m)];
        for j in 0..nbytes {
            let digits = text.get(2 * j..2 * j + 2).ok_or_else(|| Error::Parse {
                pos: 2 * j,
                msg: "non-ASCII character in hex table".into(),
            })?;
            let byte = u8::from_str_radix(digits, 16).map_err(|_| Error::Parse {
                pos: 2 * j,
                msg: format!("invalid hex byte {digits:?}"),
            })?;
            words[j / 8] |= u64::from(byte) << (8 * (j % 8));
        }
        if words[0] & !bits::word_mask(m) != 0 {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("bits set beyond the 2^{m}-bit table"),
            });
        }
        Ok(Self { m, words })
    }

    /// Renames variables: input variable `x_i` becomes `x_{perm[i-1]}`.
    /// `perm` holds the 1-based targets `p_1, ..., p_m`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        let targets = check_permutation(perm, self.m)?;
        BoolFun::from_fn(self.m, |y| {
            let x = targets
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &t)| acc | (((y >> t) & 1) << i));
            self.get(x)
        })
    }
}

fn check_permutation(perm: &[usize], m: usize) -> Result<Vec<usize>> {
    if perm.len() != m {
        return Err(Error::Permutation(format!(
            "expected {m} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; m];
    for &p in perm {
        if p == 0 || p > m || seen[p - 1] {
            return Err(Error::Permutation(format!(
                "{perm:?} is not a permutation of 1..={m}"
            )));
        }
        seen[p - 1] = true;
    }
    Ok(perm.iter().map(|p| p - 1).collect())
}

/// Parses a comma-separated 1-based permutation such as `"2,1,3"`.
pub fn parse_permutation(text: &str, m: usize) -> Result<Vec<usize>> {
    let perm = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Permutation(format!("bad entry {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_permutation(&perm, m)?;
    Ok(perm)
}

impl fmt::Debug for BoolFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFun(m={}, {})", self.m, self.to_hex())
    }
}

impl BitXor for &BoolFun {
    type Output = BoolFun;

    fn bitxor(self, rhs: &BoolFun) -> BoolFun {
        assert_eq!(
            self.m, rhs.m,
            "cannot add functions with different variable counts"
        );
        BoolFun {
            m: self.m,
            words: self
                .words
                .iter()
                .zip(&rhs.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }
}

/// Algebraic normal form: bit `mask(S)` is the coefficient `a_S`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Anf {
    m: usize,
    coeffs: Vec<u64>,
}

impl Anf {
    pub fn zero(m: usize) -> Result<Self> {
        check_vars(m)?;
        Ok(Self {
            m,
            coeffs: vec![0; bits::word_count(m)],
        })
    }

    /// Sum of the monomials with the given masks; repeated masks cancel.
    pub fn from_monomials(m: usize, masks: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut out = Self::zero(m)?;
        for mask in masks {
            if mask >= 1 << m {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("monomial mask {mask:#x} uses a variable beyond x{m}"),
                });
            }
            out.toggle(mask);
        }
        Ok(out)
    }

    pub fn from_words(m: usize, coeffs: Vec<u64>) -> Result<Self> {
        let f = BoolFun::from_words(m, coeffs)?;
        Ok(Self { m, coeffs: f.words })
    }

    fn toggle(&mut self, mask: u32) {
        self.coeffs[(mask >> 6) as usize] ^= 1 << (mask & 63);
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn words(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> bool {
        bits::bit(&self.coeffs, mask) != 0
    }

    /// Masks of the monomials present, in increasing order.
    pub fn monomials(&self) -> impl Iterator<Item = u32> + '_ {
        self.coeffs.iter().enumerate().flat_map(|(k, &w)| {
            let base = (k as u32) << 6;
            SetBits(w).map(move |b| base | b)
        })
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&w| w == 0)
    }

    /// Truth table (Möbius transform).
    pub fn truth_table(&self) -> BoolFun {
        let mut words = self.coeffs.clone();
        bits::moebius_words(&mut words, self.m);
        BoolFun { m: self.m, words }
    }

    /// Largest monomial size; 0 when no non-constant monomial is present.
    pub fn degree(&self) -> u32 {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(k, &w)| bits::max_weight_word(w).map(|d| d + k.count_ones()))
            .max()
            .unwrap_or(0)
    }

    /// Smallest monomial size; the null function has no valuation.
    pub fn valuation(&self) -> Result<u32> {
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(k, &w)| bits::min_weight_word(w).map(|d| d + k.count_ones()))
            .min()
            .ok_or(Error::NullValuation)
    }

    /// Parses the text form `x1*x3 + x2*x4 + x5 + 1`.
    pub fn parse(text: &str, m: usize) -> Result<Self> {
        check_vars(m)?;
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            m,
        }
        .parse()
    }
}

struct SetBits(u64);

impl Iterator for SetBits {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    m: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Anf> {
        let mut anf = Anf::zero(self.m)?;
        loop {
            if let Some(mask) = self.term()? {
                anf.toggle(mask);
            }
            match self.peek() {
                None => return Ok(anf),
                Some(b'+') => self.pos += 1,
                Some(c) => return Err(self.error(format!("expected '+', found {:?}", c as char))),
            }
        }
    }

    /// A product of factors; `None` when it contains the factor `0`.
    fn term(&mut self) -> Result<Option<u32>> {
        let mut mask = Some(0u32);
        loop {
            match self.factor()? {
                Some(var) => mask = mask.map(|acc| acc | var),
                None => mask = None,
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok(mask);
            }
        }
    }

    /// `Some(mask)` for a variable or `1`, `None` for `0`.
    fn factor(&mut self) -> Result<Option<u32>> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(None)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Some(0))
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits_start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = &self.bytes[digits_start..self.pos];
                let index = std::str::from_utf8(digits)
                    .ok()
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|_| !digits.is_empty());
                match index {
                    Some(i) if (1..=self.m).contains(&i) => Ok(Some(1 << (i - 1))),
                    Some(i) => {
                        self.pos = start;
                        Err(self.error(format!("variable x{i} out of range 1..={}", self.m)))
                    }
                    None => {
                        self.pos = start;
                        Err(self.error("expected variable index after 'x'"))
                    }
                }
            }
            Some(c) => Err(self.error(format!("unexpected character {:?}", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn monomial_vars(mask: u32) -> Vec<u32> {
    SetBits(u64::from(mask)).map(|b| b + 1).collect()
}

/// Canonical text: decreasing degree, then lexicographic order of the
/// variable index lists.
impl fmt::Display for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<Vec<u32>> = self.monomials().map(monomial_vars).collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        terms.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        for (i, vars) in terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if vars.is_empty() {
                f.write_str("1")?;
                continue;
            }
            for (j, v) in vars.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                write!(f, "x{v}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Anf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Anf(m={}, {})", self.m, self)
    }
}

/// The space `B(s, t, m)` of functions whose monomials all have size in `s..=t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct DegreeBand {
    pub s: usize,
    pub t: usize,
}

impl DegreeBand {
    pub fn new(s: usize, t: usize) -> Self {
        Self { s, t }
    }

    /// Every function on `m` variables.
    pub fn full(m: usize) -> Self {
        Self { s: 0, t: m }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        check_vars(m)?;
        if self.s > m || self.t > m {
            return Err(Error::Band {
                s: self.s,
                t: self.t,
                m,
            });
        }
        Ok(())
    }

    /// The band is `{0}` when `s > t`.
    pub fn is_trivial(&self) -> bool {
        self.s > self.t
    }

    pub fn contains_monomial(&self, mask: u32) -> bool {
        (self.s..=self.t).contains(&(mask.count_ones() as usize))
    }

    pub fn contains(&self, anf: &Anf) -> bool {
        anf.monomials().all(|mask| self.contains_monomial(mask))
    }

    /// Coefficient words selecting the monomials in the band.
    pub fn mask_words(&self, m: usize) -> Vec<u64> {
        let mut words = vec![0u64; bits::word_count(m)];
        for mask in 0..(1u32 << m) {
            if self.contains_monomial(mask) {
                words[(mask >> 6) as usize] |= 1 << (mask & 63);
            }
        }
        words
    }

    /// Number of monomials in the band, i.e. the dimension of `B(s, t, m)`.
    pub fn dimension(&self, m: usize) -> u32 {
        self.mask_words(m).iter().map(|w| w.count_ones()).sum()
    }

    /// Parses `"s:t"`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse {
            pos: 0,
            msg: format!("expected band as s:t, got {text:?}"),
        };
        let (s, t) = text.split_once(':').ok_or_else(bad)?;
        Ok(Self {
            s: s.trim().parse().map_err(|_| bad())?,
            t: t.trim().parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for DegreeBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.s, self.t)
    }
}

/// Uniform sample of `B(s, t, m)`, deterministic in `seed`.
pub fn random_in_band(m: usize, band: DegreeBand, seed: u64) -> Result<BoolFun> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_in_band_with(m, band, &mut rng)
}

pub fn random_in_band_with<R: Rng + ?Sized>(
    m: usize,
    band: DegreeBand,
    rng: &mut R,
) -> Result<BoolFun> {
    band.validate(m)?;
    let mask = band.mask_words(m);
    let coeffs = mask.iter().map(|&w| rng.gen::<u64>() & w).collect();
    Ok(Anf { m, coeffs }.truth_table())
}

/// Uniformly random function on `m` variables.
pub fn random_function<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<BoolFun> {
    check_vars(m)?;
    let mask = bits::word_mask(m);
    let words = (0..bits::word_count(m))
        .map(|_| rng.gen::<u64>() & mask)
        .collect();
    Ok(BoolFun { m, words })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anf(text: &str, m: usize) -> Anf {
        Anf::parse(text, m).unwrap()
    }

    #[test]
    fn single_variable_round_trip() {
        let a = Anf::from_monomials(1, [1]).unwrap();
        let f = a.truth_table();
        assert!(!f.get(0));
        assert!(f.get(1));
        assert_eq!(f.anf(), a);
    }

    #[test]
    fn zero_anf_gives_zero_table() {
        assert!(Anf::zero(2).unwrap().truth_table().is_zero());
    }

    #[test]
    fn product_x1x2_table() {
        let f = Anf::from_monomials(2, [0b11]).unwrap().truth_table();
        let bits: Vec<bool> = (0..4).map(|x| f.get(x)).collect();
        assert_eq!(bits, [false, false, false, true]);
        assert_eq!(f.to_hex(), "08");
    }

    #[test]
    fn constant_one_anf() {
        let f = BoolFun::one(3).unwrap();
        let a = f.anf();
        assert_eq!(a.monomials().collect::<Vec<_>>(), [0]);
        assert_eq!(f.degree(), 0);
    }

    #[test]
    fn degree_conventions() {
        for m in 1..=9 {
            assert_eq!(BoolFun::zero(m).unwrap().degree(), 0);
            assert_eq!(BoolFun::one(m).unwrap().degree(), 0);
        }
        assert_eq!(anf("x1*x2*x3*x4*x5*x6*x7*x8", 8).degree(), 8);
        assert_eq!(anf("x7*x8 + x1", 8).degree(), 2);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(anf("x1*x2 + x1*x2*x3", 3).valuation().unwrap(), 2);
        assert_eq!(anf("1 + x1", 1).valuation().unwrap(), 0);
        assert!(matches!(
            Anf::zero(3).unwrap().valuation(),
            Err(Error::NullValuation)
        ));
        assert_eq!(anf("x7*x8 + x3*x4*x8", 8).valuation().unwrap(), 2);
    }

    #[test]
    fn parse_quadric() {
        let a = anf("x1*x3 + x2*x4 + x5", 5);
        assert_eq!(a.monomials().collect::<Vec<_>>(), [0b101, 0b1010, 0b10000]);
    }

    #[test]
    fn parse_cancellation_and_whitespace() {
        assert!(anf("x1 + x1", 1).is_zero());
        assert_eq!(anf(" x2 *x1+1 + x1*x1", 2), anf("x1*x2 + x1 + 1", 2));
        assert!(anf("x1*0 + 0", 2).is_zero());
    }

    #[test]
    fn parse_errors_report_position() {
        match Anf::parse("x9", 8) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("unexpected {other:?}"),
        }
        match Anf::parse("x1 + x2 + y", 3) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("unexpected {other:?}"),
        }
        for bad in ["", "x1 +", "x", "x1 x2", "x0", "x1**x2"] {
            assert!(Anf::parse(bad, 3).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn format_is_canonical() {
        let a = anf("x5 + 1 + x2*x4 + x1*x3 + x1*x2*x3", 5);
        assert_eq!(a.to_string(), "x1*x2*x3 + x1*x3 + x2*x4 + x5 + 1");
        assert_eq!(Anf::zero(4).unwrap().to_string(), "0");
        assert_eq!(anf(&a.to_string(), 5), a);
    }

    #[test]
    fn hex_round_trip_and_errors() {
        let f = anf("x1*x2*x3 + x4", 4).truth_table();
        assert_eq!(BoolFun::from_hex(&f.to_hex(), 4).unwrap(), f);
        assert!(BoolFun::from_hex("0", 2).is_err());
        assert!(BoolFun::from_hex("zz", 3).is_err());
        assert!(BoolFun::from_hex("10", 2).is_err());
        let g = anf("x7*x8 + x1", 8).truth_table();
        assert_eq!(g.to_hex().len(), 64);
        assert_eq!(BoolFun::from_hex(&g.to_hex(), 8).unwrap(), g);
    }

    #[test]
    fn permutation_renames_monomials() {
        let f = anf("x1*x2 + x3", 3).truth_table();
        let g = f.permute_vars(&[3, 1, 2]).unwrap();
        assert_eq!(g.anf(), anf("x3*x1 + x2", 3));
        assert!(f.permute_vars(&[1, 1, 2]).is_err());
        assert_eq!(parse_permutation("2, 1,3", 3).unwrap(), [2, 1, 3]);
        assert!(parse_permutation("1,2", 3).is_err());
    }

    #[test]
    fn band_sampling() {
        let lin = DegreeBand::new(1, 1);
        for seed in 0..20 {
            let f = random_in_band(6, lin, seed).unwrap();
            assert!(f.anf().monomials().all(|s| s.count_ones() == 1));
        }
        assert!(random_in_band(5, DegreeBand::new(5, 4), 7)
            .unwrap()
            .is_zero());
        let a = random_in_band(8, DegreeBand::new(2, 4), 99).unwrap();
        let b = random_in_band(8, DegreeBand::new(2, 4), 99).unwrap();
        assert_eq!(a, b);
        assert!(DegreeBand::new(2, 4).contains(&a.anf()));
        assert!(DegreeBand::new(1, 9).validate(8).is_err());
        assert_eq!(DegreeBand::new(2, 3).dimension(8), 28 + 56);
    }

    #[test]
    fn variable_count_bounds() {
        assert!(BoolFun::zero(0).is_err());
        assert!(BoolFun::zero(17).is_err());
        assert_eq!(BoolFun::zero(16).unwrap().words().len(), 1024);
    }
}
