//! Restrictions to flats, relative degree, r-degree and normality.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::boolfun::BoolFun;
use crate::error::{Error, Result};
use crate::subspace::{enumerate_subspaces, AffineFlat, FlatTable, FlatTableCache, LinearSubspace};

/// Dimension `ceil(m / 2)` used by the normality notions.
pub fn normality_dim(m: usize) -> usize {
    m.div_ceil(2)
}

fn check_flat(f: &BoolFun, flat: &AffineFlat) -> Result<()> {
    if f.m() != flat.m() {
        return Err(Error::DimensionMismatch {
            expected: flat.m(),
            got: f.m(),
        });
    }
    Ok(())
}

/// Restriction `v -> f(a + v)` of `f` to the flat `a + V`, written in the
/// coordinates of the flat's basis.
pub fn restrict(f: &BoolFun, flat: &AffineFlat) -> Result<BoolFun> {
    check_flat(f, flat)?;
    let points = flat.points();
    let r = flat.dim();
    let mut words = vec![0u64; bits::word_count(r)];
    for (j, &p) in points.iter().enumerate() {
        words[j >> 6] |= bits::bit(f.words(), p) << (j & 63);
    }
    Ok(BoolFun::from_raw(r, words))
}

/// Degree of the restriction of `f` to `flat`; 0 when it is constant.
pub fn rel_degree(f: &BoolFun, flat: &AffineFlat) -> Result<u32> {
    check_flat(f, flat)?;
    let offsets = flat.subspace().points();
    Ok(coset_degree(f.words(), flat.rep(), &offsets, flat.dim()))
}

#[inline]
fn gather(words: &[u64], rep: u32, offsets: &[u32]) -> u64 {
    offsets
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &o)| acc | (bits::bit(words, rep ^ o) << j))
}

/// Degree of `f` on the coset `rep + <offsets>`.
#[inline]
fn coset_degree(words: &[u64], rep: u32, offsets: &[u32], r: usize) -> u32 {
    if r <= 6 {
        bits::window_degree(gather(words, rep, offsets), r)
    } else {
        let mut window = vec![0u64; bits::word_count(r)];
        for (j, &o) in offsets.iter().enumerate() {
            window[j >> 6] |= bits::bit(words, rep ^ o) << (j & 63);
        }
        BoolFun::from_raw(r, window).degree()
    }
}

/// Constant value of `f` on the coset, if any.
#[inline]
fn coset_constant(words: &[u64], rep: u32, offsets: &[u32], k: usize) -> Option<bool> {
    if k <= 6 {
        let w = gather(words, rep, offsets);
        if w == 0 {
            Some(false)
        } else if w == bits::word_mask(k) {
            Some(true)
        } else {
            None
        }
    } else {
        let first = bits::bit(words, rep ^ offsets[0]);
        offsets[1..]
            .iter()
            .all(|&o| bits::bit(words, rep ^ o) == first)
            .then_some(first == 1)
    }
}

/// Minimum relative degree over the flats of `table`, with the first flat
/// (space index, coset index) achieving it. Stops once `floor` is reached.
fn scan_min(f: &BoolFun, table: &FlatTable, floor: u32) -> (u32, usize, usize) {
    let words = f.words();
    let r = table.r();
    let mut best = (u32::MAX, 0, 0);
    for i in 0..table.space_count() {
        let offsets = table.offsets(i);
        for (c, &rep) in table.reps(i).iter().enumerate() {
            let d = coset_degree(words, rep, offsets, r);
            if d < best.0 {
                best = (d, i, c);
                if d <= floor {
                    return best;
                }
            }
        }
    }
    best
}

/// `deg_r(f)`: the minimum relative degree over all `r`-dimensional flats.
pub fn r_degree(f: &BoolFun, r: usize, table: &FlatTable) -> Result<u32> {
    r_degree_with_witness(f, r, table).map(|(d, _)| d)
}

/// `deg_r(f)` with the first flat (in table order) attaining it.
pub fn r_degree_with_witness(
    f: &BoolFun,
    r: usize,
    table: &FlatTable,
) -> Result<(u32, AffineFlat)> {
    table.check(f.m(), r)?;
    let (d, i, c) = scan_min(f, table, 0);
    Ok((d, table.flat(i, c)))
}

/// `deg_r(f)` by streaming the subspaces, without a prebuilt table.
pub fn r_degree_streaming(f: &BoolFun, r: usize) -> Result<(u32, AffineFlat)> {
    let mut best: Option<(u32, AffineFlat)> = None;
    for v in enumerate_subspaces(f.m(), r)? {
        let offsets = v.points();
        for rep in v.coset_reps() {
            let d = coset_degree(f.words(), rep, &offsets, r);
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, AffineFlat::new(v.clone(), rep)?));
                if d == 0 {
                    return Ok(best.unwrap());
                }
            }
        }
    }
    Ok(best.expect("at least one flat"))
}

/// Normality verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normality {
    /// Constant on some `ceil(m/2)`-flat.
    Normal,
    /// Not normal, affine on some `ceil(m/2)`-flat.
    WeaklyNormal,
    /// `deg_{ceil(m/2)}(f) >= 2`.
    Abnormal,
}

impl Normality {
    pub fn from_min_degree(d: u32) -> Self {
        match d {
            0 => Normality::Normal,
            1 => Normality::WeaklyNormal,
            _ => Normality::Abnormal,
        }
    }
}

impl fmt::Display for Normality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normality::Normal => "Normal",
            Normality::WeaklyNormal => "WeaklyNormal",
            Normality::Abnormal => "Abnormal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityReport {
    pub status: Normality,
    pub r_used: usize,
    pub witness: Option<AffineFlat>,
    pub witness_degree: Option<u32>,
    pub min_rel_degree: u32,
}

impl NormalityReport {
    fn new(r: usize, min: u32, witness: Option<AffineFlat>) -> Self {
        let status = Normality::from_min_degree(min);
        let (witness, witness_degree) = match status {
            Normality::Abnormal => (None, None),
            _ => (witness, Some(min)),
        };
        Self {
            status,
            r_used: r,
            witness,
            witness_degree,
            min_rel_degree: min,
        }
    }
}

/// Classifies by scanning every `ceil(m/2)`-flat of `table`.
pub fn classify_normality_naive(f: &BoolFun, table: &FlatTable) -> Result<NormalityReport> {
    let r = normality_dim(f.m());
    table.check(f.m(), r)?;
    let (min, i, c) = scan_min(f, table, 0);
    Ok(NormalityReport::new(r, min, Some(table.flat(i, c))))
}

/// Classifies from the `(ceil(m/2) - 1)`-flats: two cosets of one subspace
/// on which `f` is constant span a `ceil(m/2)`-flat where `f` is constant
/// (equal values) or affine (distinct values), and every such flat arises
/// this way.
pub fn classify_normality_paired(f: &BoolFun, table: &FlatTable) -> Result<NormalityReport> {
    let r = normality_dim(f.m());
    let k = r - 1;
    table.check(f.m(), k)?;
    let words = f.words();
    let mut weak: Option<(usize, u32, u32)> = None;
    for i in 0..table.space_count() {
        let offsets = table.offsets(i);
        let mut first = [None::<u32>; 2];
        for &rep in table.reps(i) {
            let Some(value) = coset_constant(words, rep, offsets, k) else {
                continue;
            };
            match first[value as usize] {
                Some(other) => {
                    let flat = union_flat(table, i, other, rep)?;
                    return Ok(NormalityReport::new(r, 0, Some(flat)));
                }
                None => first[value as usize] = Some(rep),
            }
            if weak.is_none() {
                if let [Some(a), Some(b)] = first {
                    weak = Some((i, a, b));
                }
            }
        }
    }
    if let Some((i, a, b)) = weak {
        let flat = union_flat(table, i, a, b)?;
        return Ok(NormalityReport::new(r, 1, Some(flat)));
    }
    let (min, _) = r_degree_streaming(f, r)?;
    Ok(NormalityReport::new(r, min, None))
}

fn union_flat(table: &FlatTable, space: usize, a: u32, b: u32) -> Result<AffineFlat> {
    let mut vectors = table.basis(space).to_vec();
    vectors.push(a ^ b);
    AffineFlat::new(LinearSubspace::span(table.m(), &vectors)?, a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Paired,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Method::Naive),
            "paired" => Ok(Method::Paired),
            "both" => Ok(Method::Both),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown method {s:?}, expected naive|paired|both"),
            }),
        }
    }
}

/// Classifies with tables from `cache`. With [`Method::Both`] the two
/// verdicts must agree; the naive report is returned.
pub fn classify_normality(
    f: &BoolFun,
    cache: &FlatTableCache,
    method: Method,
) -> Result<NormalityReport> {
    let r = normality_dim(f.m());
    match method {
        Method::Naive => classify_normality_naive(f, &*cache.get(f.m(), r)?),
        Method::Paired => classify_normality_paired(f, &*cache.get(f.m(), r - 1)?),
        Method::Both => {
            let naive = classify_normality_naive(f, &*cache.get(f.m(), r)?)?;
            let paired = classify_normality_paired(f, &*cache.get(f.m(), r - 1)?)?;
            if naive.status != paired.status || naive.min_rel_degree != paired.min_rel_degree {
                return Err(Error::Disagreement {
                    naive: format!("{} (deg {})", naive.status, naive.min_rel_degree),
                    paired: format!("{} (deg {})", paired.status, paired.min_rel_degree),
                });
            }
            Ok(naive)
        }
    }
}

/// Per-dimension histograms of `deg_r` over a set of functions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelDegDistribution {
    pub m: Option<usize>,
    pub total: u64,
    /// `rows[r][d]` counts the functions with `deg_r = d`.
    pub rows: BTreeMap<usize, Vec<u64>>,
}

impl RelDegDistribution {
    pub fn new(dims: &[usize]) -> Self {
        Self {
            m: None,
            total: 0,
            rows: dims.iter().map(|&r| (r, vec![0; r + 1])).collect(),
        }
    }

    fn check_m(&mut self, m: usize) -> Result<()> {
        match self.m {
            Some(expected) if expected != m => Err(Error::DimensionMismatch { expected, got: m }),
            _ => {
                self.m = Some(m);
                Ok(())
            }
        }
    }

    /// Records precomputed `(r, deg_r)` values for one function.
    pub fn record(&mut self, m: usize, degrees: &[(usize, u32)]) -> Result<()> {
        self.check_m(m)?;
        for &(r, d) in degrees {
            let row = self.rows.entry(r).or_insert_with(|| vec![0; r + 1]);
            row[d as usize] += 1;
        }
        self.total += 1;
        Ok(())
    }

    pub fn add(&mut self, f: &BoolFun, cache: &FlatTableCache) -> Result<()> {
        let dims: Vec<usize> = self.rows.keys().copied().collect();
        let degrees = dims
            .iter()
            .map(|&r| Ok((r, r_degree(f, r, &*cache.get(f.m(), r)?)?)))
            .collect::<Result<Vec<_>>>()?;
        self.record(f.m(), &degrees)
    }

    pub fn row(&self, r: usize) -> Option<&[u64]> {
        self.rows.get(&r).map(Vec::as_slice)
    }
}

/// Histogram of `deg_r` for each `r` in `dims`.
pub fn distribution<'a>(
    functions: impl IntoIterator<Item = &'a BoolFun>,
    dims: &[usize],
    cache: &FlatTableCache,
) -> Result<RelDegDistribution> {
    let mut dist = RelDegDistribution::new(dims);
    for f in functions {
        dist.add(f, cache)?;
    }
    Ok(dist)
}
