//! `D_r(k, m)` table entries, brute-force work factors and batch scans.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bits;
use crate::boolfun::{random_in_band, Anf, BoolFun, DegreeBand};
use crate::error::{Error, Result};
use crate::reldeg::{classify_normality, r_degree, Method, NormalityReport, RelDegDistribution};
use crate::subspace::{gaussian_binomial, AffineFlat, FlatTable, FlatTableCache};

/// Number of AGL(m,2) classes of `B(s, t, m)` for the spaces whose
/// classification is published, as `(s, t, m, classes)`.
pub const KNOWN_CLASS_COUNTS: [(usize, usize, usize, u64); 6] = [
    (1, 5, 5, 206),
    (1, 6, 6, 7_888_299),
    (1, 3, 7, 1_890),
    (4, 7, 7, 68_443),
    (2, 3, 8, 20_748),
    (4, 4, 8, 999),
];

pub fn known_class_count(s: usize, t: usize, m: usize) -> Option<u64> {
    KNOWN_CLASS_COUNTS
        .iter()
        .find(|&&(s2, t2, m2, _)| (s2, t2, m2) == (s, t, m))
        .map(|&(_, _, _, n)| n)
}

/// Cost model `N * 2^(m-r) * [m r] * r 2^r` for computing `deg_r` over `N`
/// class representatives by brute force.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkFactor {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub m: usize,
    pub class_count: u64,
    pub value: u128,
    pub log2: f64,
}

pub fn work_factor(r: usize, s: usize, t: usize, m: usize, class_count: u64) -> Result<WorkFactor> {
    if class_count == 0 {
        return Err(Error::Parse {
            pos: 0,
            msg: "class count must be positive".into(),
        });
    }
    let spaces = gaussian_binomial(m, r)?;
    let overflow = || Error::Overflow(format!("work_factor({r}, {s}, {t}, {m})"));
    let value = u128::from(class_count)
        .checked_mul(1u128 << (m - r))
        .and_then(|v| v.checked_mul(u128::from(spaces)))
        .and_then(|v| v.checked_mul(r as u128))
        .and_then(|v| v.checked_mul(1u128 << r))
        .ok_or_else(overflow)?;
    Ok(WorkFactor {
        r,
        s,
        t,
        m,
        class_count,
        value,
        log2: (value as f64).log2(),
    })
}

/// Whether an entry is `D_r` (degree at most `k`) or `D^dagger_r` (degree exactly `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeConstraint {
    AtMost,
    Exactly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryMode {
    Exact,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTableEntry {
    pub m: usize,
    pub r: usize,
    pub k: usize,
    pub constraint: DegreeConstraint,
    pub mode: EntryMode,
    pub value: u32,
    pub witness: Option<BoolFun>,
    pub functions_scanned: u64,
    pub seed: Option<u64>,
    /// How the value was established.
    pub domain: String,
}

impl DTableEntry {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "r": self.r,
            "k": self.k,
            "constraint": self.constraint,
            "mode": self.mode,
            "value": self.value,
            "witness": self.witness.as_ref().map(|w| json!({
                "anf": w.anf().to_string(),
                "hex": w.to_hex(),
            })),
            "functions_scanned": self.functions_scanned,
            "seed": self.seed,
            "domain": self.domain,
        })
    }
}

/// Outcome of [`exhaustive_m5_rows`].
#[derive(Clone, Debug)]
pub struct ExhaustiveM5Report {
    /// Rows `r = 3` then `r = 2`, each for `k = 1..=5`.
    pub entries: Vec<DTableEntry>,
    /// Functions of `B(2,5,5)` scanned.
    pub scanned: u64,
    /// Functions with no constant 3-flat, i.e. scanned without early exit.
    pub full_scans: u64,
    /// Full-scan functions whose fast `deg_3` was re-checked with [`r_degree`].
    pub reverified: u64,
    /// `deg_3` histogram over `B(2,5,5)`: counts of 0, 1 and at least 2.
    pub deg3_histogram: [u64; 3],
}

impl ExhaustiveM5Report {
    pub fn entry(&self, r: usize, k: usize) -> Option<&DTableEntry> {
        self.entries.iter().find(|e| e.r == r && e.k == k)
    }
}

/// Bit-parallel `deg_3` / `deg_2` kernel on 32-bit tables of `B(5)`.
///
/// For a linear space `V`, `AND_{v in V} f(x + v)` marks the points whose
/// coset `x + V` is constantly 1, and likewise for 0, so one pass per
/// subspace tests all of its cosets.
struct M5Kernel {
    spaces3: Vec<[u32; 8]>,
    spaces2: Vec<[u32; 4]>,
    table3: FlatTable,
    monomial_lo: Vec<u32>,
    monomial_hi: Vec<u32>,
}

/// `deg_3` as far as the kernel resolves it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Deg3 {
    Zero,
    One,
    AtLeastTwo,
}

const M5_COUNTER_BITS: u32 = 26;

impl M5Kernel {
    fn new() -> Result<Self> {
        let table3 = FlatTable::build(5, 3)?;
        let table2 = FlatTable::build(5, 2)?;
        let spaces3 = (0..table3.space_count())
            .map(|i| table3.offsets(i).try_into().expect("8 points"))
            .collect();
        let spaces2 = (0..table2.space_count())
            .map(|i| table2.offsets(i).try_into().expect("4 points"))
            .collect();
        // Counter bit k selects the k-th monomial of size >= 2.
        let masks: Vec<u32> = (0..32u32).filter(|s| s.count_ones() >= 2).collect();
        debug_assert_eq!(masks.len(), M5_COUNTER_BITS as usize);
        let spread = |bits: u32, offset: usize| {
            (0..13)
                .filter(|&b| (bits >> b) & 1 == 1)
                .fold(0u32, |acc, b| acc | 1 << masks[offset + b])
        };
        Ok(Self {
            spaces3,
            spaces2,
            table3,
            monomial_lo: (0..1 << 13).map(|c| spread(c, 0)).collect(),
            monomial_hi: (0..1 << 13).map(|c| spread(c, 13)).collect(),
        })
    }

    #[inline]
    fn anf_of(&self, counter: u32) -> u32 {
        self.monomial_lo[(counter & 0x1fff) as usize] | self.monomial_hi[(counter >> 13) as usize]
    }

    #[inline]
    fn translations(table: u32) -> [u32; 32] {
        let mut t = [0u32; 32];
        t[0] = table;
        for v in 1..32usize {
            let j = v.trailing_zeros() as usize;
            t[v] = bits::flip_var_word(u64::from(t[v & (v - 1)]), j) as u32;
        }
        t
    }

    #[inline]
    fn constant_cosets<const N: usize>(t: &[u32; 32], space: &[u32; N]) -> u32 {
        let mut ones = u32::MAX;
        let mut zeros = u32::MAX;
        for &o in space {
            ones &= t[o as usize];
            zeros &= !t[o as usize];
        }
        ones | zeros
    }

    fn deg3(&self, t: &[u32; 32]) -> Deg3 {
        if self
            .spaces3
            .iter()
            .any(|s| Self::constant_cosets(t, s) != 0)
        {
            return Deg3::Zero;
        }
        // No constant 3-flat: any two constant cosets of a 2-space carry
        // distinct values and span a 3-flat where f is affine.
        if self
            .spaces2
            .iter()
            .any(|s| Self::constant_cosets(t, s).count_ones() >= 8)
        {
            Deg3::One
        } else {
            Deg3::AtLeastTwo
        }
    }

    fn deg2_is_zero(&self, t: &[u32; 32]) -> bool {
        self.spaces2
            .iter()
            .any(|s| Self::constant_cosets(t, s) != 0)
    }

    fn bool_fun(table: u32) -> BoolFun {
        BoolFun::from_words(5, vec![u64::from(table)]).expect("32-bit table")
    }
}

#[derive(Clone, Debug, Default)]
struct M5Stats {
    scanned: u64,
    full_scans: u64,
    reverified: u64,
    deg3_hist: [u64; 3],
    /// Per degree k: (max deg_3 seen, first counter attaining it).
    best3: [Option<(u32, u32)>; 6],
    /// Per degree k: (max deg_2 seen, first counter of degree k).
    deg2: [Option<(u32, u32)>; 6],
    mismatches: Vec<u32>,
}

fn merge_best(a: Option<(u32, u32)>, b: Option<(u32, u32)>) -> Option<(u32, u32)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
            y
        } else {
            x
        }),
        (x, None) => x,
        (None, y) => y,
    }
}

impl M5Stats {
    fn merge(mut self, other: M5Stats) -> M5Stats {
        self.scanned += other.scanned;
        self.full_scans += other.full_scans;
        self.reverified += other.reverified;
        for i in 0..3 {
            self.deg3_hist[i] += other.deg3_hist[i];
        }
        for k in 0..6 {
            self.best3[k] = merge_best(self.best3[k], other.best3[k]);
            self.deg2[k] = merge_best(self.deg2[k], other.deg2[k]);
        }
        self.mismatches.extend(other.mismatches);
        self.mismatches.sort_unstable();
        self
    }
}

fn scan_m5_chunk(kernel: &M5Kernel, range: std::ops::Range<u32>) -> Result<M5Stats> {
    let mut st = M5Stats::default();
    for counter in range {
        let anf = kernel.anf_of(counter);
        let k = bits::max_weight_word(u64::from(anf)).unwrap_or(0) as usize;
        let table = bits::moebius_word(u64::from(anf), 5) as u32;
        let t = M5Kernel::translations(table);
        let d3 = kernel.deg3(&t);
        let mut exact3 = match d3 {
            Deg3::Zero => 0,
            Deg3::One => 1,
            Deg3::AtLeastTwo => 2,
        };
        st.deg3_hist[exact3 as usize] += 1;
        if d3 != Deg3::Zero {
            st.full_scans += 1;
            let f = M5Kernel::bool_fun(table);
            let oracle = r_degree(&f, 3, &kernel.table3)?;
            st.reverified += 1;
            if d3 == Deg3::AtLeastTwo {
                exact3 = oracle;
            }
            if oracle.min(2) != exact3.min(2) {
                st.mismatches.push(counter);
            }
        }
        let d2 = if kernel.deg2_is_zero(&t) { 0 } else { 1 };
        st.best3[k] = merge_best(st.best3[k], Some((exact3, counter)));
        st.deg2[k] = merge_best(st.deg2[k], Some((d2, counter)));
        st.scanned += 1;
    }
    Ok(st)
}

/// Finds `f + l` of degree `k` with `deg_3 = 1`, `f` in `B(2,5,5)` and `l` affine.
fn m5_affine_shift_witness(kernel: &M5Kernel, k: usize) -> Option<u32> {
    for counter in 0..1u32 << M5_COUNTER_BITS {
        let anf = kernel.anf_of(counter);
        if bits::max_weight_word(u64::from(anf)) != Some(k as u32) {
            continue;
        }
        let table = bits::moebius_word(u64::from(anf), 5) as u32;
        for shift in 1..64u32 {
            let affine = affine_table_m5(shift);
            let t = M5Kernel::translations(table ^ affine);
            if kernel.deg3(&t) == Deg3::One {
                return Some(table ^ affine);
            }
        }
    }
    None
}

/// Table of `u.x + c` with `u` the low five bits of `shift` and `c` bit 5.
fn affine_table_m5(shift: u32) -> u32 {
    let u = shift & 31;
    let c = shift >> 5 & 1 == 1;
    (0..32u32).fold(0, |acc, x| {
        let v = ((x & u).count_ones() & 1 == 1) ^ c;
        acc | (u32::from(v) << x)
    })
}

/// Rows `r = 3` and `r = 2` of `D^dagger_r(k, 5)` by exhaustive scan.
///
/// Every function of `B(2,5,5)` (no constant or linear part, `2^26`
/// functions) is scanned. Adding an affine function leaves every relative
/// degree of at least 2 unchanged and keeps the others below 2, so the
/// values of `deg_3` that are at least 2 over `B(5)` are exactly those over
/// `B(2,5,5)`. When `deg_3 <= 1` everywhere, every function is affine on
/// some 3-flat and hence constant on one of its 2-flats, so `deg_2 = 0`
/// on all of `B(5)`. Degree-1 columns are computed over all affine
/// functions directly.
pub fn exhaustive_m5_rows() -> Result<ExhaustiveM5Report> {
    let kernel = M5Kernel::new()?;
    const CHUNK: u32 = 1 << 14;
    let chunks = (1u32 << M5_COUNTER_BITS) / CHUNK;
    let stats = (0..chunks)
        .into_par_iter()
        .map(|c| scan_m5_chunk(&kernel, c * CHUNK..(c + 1) * CHUNK))
        .try_reduce(M5Stats::default, |a, b| Ok(a.merge(b)))?;
    if let Some(&counter) = stats.mismatches.first() {
        return Err(Error::Disagreement {
            naive: format!("r_degree oracle on ANF counter {counter:#x}"),
            paired: "bit-parallel deg_3 kernel".into(),
        });
    }

    let scanned = stats.scanned;
    let max3_all = stats.best3.iter().flatten().map(|b| b.0).max().unwrap_or(0);
    let table2 = FlatTable::build(5, 2)?;
    let mut row3 = Vec::new();
    let mut row2 = Vec::new();

    // k = 1: every degree-1 function u.x + c, u != 0.
    let mut lin3 = (0u32, None);
    let mut lin2 = (0u32, None);
    for shift in (1..64u32).filter(|s| s & 31 != 0) {
        let f = M5Kernel::bool_fun(affine_table_m5(shift));
        let d3 = r_degree(&f, 3, &kernel.table3)?;
        let d2 = r_degree(&f, 2, &table2)?;
        if lin3.1.is_none() || d3 > lin3.0 {
            lin3 = (d3, Some(f.clone()));
        }
        if lin2.1.is_none() || d2 > lin2.0 {
            lin2 = (d2, Some(f));
        }
    }
    let affine_domain = "all 62 functions of degree 1 on 5 variables".to_string();
    row3.push(exact_entry(3, 1, lin3.0, lin3.1, 62, affine_domain.clone()));
    row2.push(exact_entry(2, 1, lin2.0, lin2.1, 62, affine_domain));

    for k in 2..=5 {
        let (best, counter) = stats.best3[k].expect("every degree occurs in B(2,5,5)");
        let scan_domain = format!(
            "all 2^26 functions of B(2,5,5), extended to degree-{k} functions of B(5) by affine-shift invariance"
        );
        let (value, witness) = if best >= 1 {
            let table = bits::moebius_word(u64::from(kernel.anf_of(counter)), 5) as u32;
            (best, M5Kernel::bool_fun(table))
        } else {
            match m5_affine_shift_witness(&kernel, k) {
                Some(t) => (1, M5Kernel::bool_fun(t)),
                None => {
                    let table = bits::moebius_word(u64::from(kernel.anf_of(counter)), 5) as u32;
                    (0, M5Kernel::bool_fun(table))
                }
            }
        };
        row3.push(exact_entry(
            3,
            k,
            value,
            Some(witness),
            scanned,
            scan_domain,
        ));

        let (d2, counter2) = stats.deg2[k].expect("every degree occurs in B(2,5,5)");
        let table = bits::moebius_word(u64::from(kernel.anf_of(counter2)), 5) as u32;
        let witness = M5Kernel::bool_fun(table);
        let mut entry = exact_entry(
            2,
            k,
            d2,
            Some(witness),
            scanned,
            "all 2^26 functions of B(2,5,5); deg_3 <= 1 on B(5) forces a constant 2-flat".into(),
        );
        if max3_all >= 2 || d2 > 0 {
            entry.mode = EntryMode::LowerBound;
            entry.domain = "all 2^26 functions of B(2,5,5) only".into();
        }
        row2.push(entry);
    }

    let mut entries = row3;
    entries.extend(row2);
    // Witnesses are checked against the table-driven oracle.
    for e in &entries {
        let w = e.witness.as_ref().expect("witness");
        let table = if e.r == 3 { &kernel.table3 } else { &table2 };
        debug_assert_eq!(w.degree() as usize, e.k);
        if r_degree(w, e.r, table)? != e.value {
            return Err(Error::Disagreement {
                naive: format!("r_degree of witness {} is not {}", w.anf(), e.value),
                paired: "exhaustive scan".into(),
            });
        }
    }
    Ok(ExhaustiveM5Report {
        entries,
        scanned,
        full_scans: stats.full_scans,
        reverified: stats.reverified,
        deg3_histogram: stats.deg3_hist,
    })
}

fn exact_entry(
    r: usize,
    k: usize,
    value: u32,
    witness: Option<BoolFun>,
    scanned: u64,
    domain: String,
) -> DTableEntry {
    DTableEntry {
        m: 5,
        r,
        k,
        constraint: DegreeConstraint::Exactly,
        mode: EntryMode::Exact,
        value,
        witness,
        functions_scanned: scanned,
        seed: None,
        domain,
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `i` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    splitmix64(seed ^ splitmix64(i))
}

/// Lower bound on `D_r(k, m)` from `trials` random samples of `band`, each
/// optionally added to `base[i % base.len()]`.
pub fn random_lower_bound(
    m: usize,
    r: usize,
    band: DegreeBand,
    trials: u64,
    seed: u64,
    table: &FlatTable,
    base: &[BoolFun],
) -> Result<DTableEntry> {
    if trials == 0 {
        return Err(Error::Parse {
            pos: 0,
            msg: "trials must be at least 1".into(),
        });
    }
    band.validate(m)?;
    table.check(m, r)?;
    if let Some(b) = base.iter().find(|b| b.m() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: b.m(),
        });
    }
    let sample = |i: u64| -> Result<BoolFun> {
        let g = random_in_band(m, band, trial_seed(seed, i))?;
        Ok(if base.is_empty() {
            g
        } else {
            &base[(i % base.len() as u64) as usize] ^ &g
        })
    };
    let (value, best) = (0..trials)
        .into_par_iter()
        .map(|i| Ok::<_, Error>((r_degree(&sample(i)?, r, table)?, i)))
        .try_reduce(
            || (0, u64::MAX),
            |a, b| {
                Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                })
            },
        )?;
    let k = base
        .iter()
        .map(|b| b.degree() as usize)
        .chain([if band.is_trivial() { 0 } else { band.t }])
        .max()
        .unwrap_or(0);
    let domain = if base.is_empty() {
        format!("{trials} uniform samples of B({}, {}, {m})", band.s, band.t)
    } else {
        format!(
            "{trials} samples of base + B({}, {}, {m}) over {} base functions",
            band.s,
            band.t,
            base.len()
        )
    };
    Ok(DTableEntry {
        m,
        r,
        k,
        constraint: DegreeConstraint::AtMost,
        mode: EntryMode::LowerBound,
        value,
        witness: Some(sample(best)?),
        functions_scanned: trials,
        seed: Some(seed),
        domain,
    })
}

/// Text encoding of one function per line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Anf,
    Hex,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anf" => Ok(InputFormat::Anf),
            "hex" => Ok(InputFormat::Hex),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown format {s:?}, expected anf|hex"),
            }),
        }
    }
}

/// Number of variables of a hex truth table with `digits` hex digits.
pub fn hex_vars(digits: usize) -> Option<usize> {
    let bytes = digits / 2;
    if !digits.is_multiple_of(2) || !bytes.is_power_of_two() {
        return None;
    }
    let m = 3 + bytes.trailing_zeros() as usize;
    (m <= crate::boolfun::MAX_VARS).then_some(m)
}

/// Parses one function in the given format. For hex input `m` may be
/// omitted and is then read off the table length.
pub fn parse_function(text: &str, format: InputFormat, m: Option<usize>) -> Result<BoolFun> {
    let text = text.trim();
    match format {
        InputFormat::Anf => {
            let m = m.ok_or(Error::Parse {
                pos: 0,
                msg: "ANF input needs the number of variables".into(),
            })?;
            Ok(Anf::parse(text, m)?.truth_table())
        }
        InputFormat::Hex => {
            let m = match m {
                Some(m) => m,
                None => hex_vars(text.len()).ok_or(Error::Parse {
                    pos: 0,
                    msg: format!("hex table length {} is not 2^m bits", text.len() * 4),
                })?,
            };
            BoolFun::from_hex(text, m)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub format: InputFormat,
    /// Required for ANF input; inferred from the first line for hex.
    pub m: Option<usize>,
    /// Dimensions `r` for the `deg_r` histogram.
    pub dims: Vec<usize>,
    /// 1-based variable renaming applied to every input.
    pub permutation: Option<Vec<usize>>,
    pub method: Method,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            format: InputFormat::Anf,
            m: None,
            dims: Vec::new(),
            permutation: None,
            method: Method::Paired,
        }
    }
}

/// Per-function result of a batch scan.
#[derive(Clone, Debug)]
pub struct FunctionRecord {
    /// 1-based input line.
    pub id: usize,
    pub m: usize,
    pub degree: u32,
    pub report: NormalityReport,
    pub rel_degrees: Vec<(usize, u32)>,
}

pub fn flat_json(flat: &AffineFlat) -> Value {
    json!({
        "basis": flat.subspace().basis().iter().map(|b| format!("{b:#x}")).collect::<Vec<_>>(),
        "rep": format!("{:#x}", flat.rep()),
    })
}

impl FunctionRecord {
    /// One JSON-lines record.
    pub fn to_json(&self) -> Value {
        let deg_r: serde_json::Map<String, Value> = self
            .rel_degrees
            .iter()
            .map(|(r, d)| (r.to_string(), json!(d)))
            .collect();
        json!({
            "id": self.id,
            "m": self.m,
            "degree": self.degree,
            "status": self.report.status,
            "min_rel_degree": self.report.min_rel_degree,
            "r": self.report.r_used,
            "witness": self.report.witness.as_ref().map(flat_json),
            "witness_degree": self.report.witness_degree,
            "deg_r": deg_r,
        })
    }
}

const SCAN_BATCH: usize = 4096;

/// Streams functions from `reader`, classifies each, and hands the records to
/// `sink` in input order. Blank lines and lines starting with `#` are skipped.
pub fn scan_reader<R: BufRead>(
    reader: R,
    opts: &ScanOptions,
    cache: &FlatTableCache,
    mut sink: impl FnMut(&FunctionRecord) -> Result<()>,
) -> Result<RelDegDistribution> {
    let mut dist = RelDegDistribution::new(&opts.dims);
    let mut m = opts.m;
    let mut batch: Vec<(usize, BoolFun)> = Vec::with_capacity(SCAN_BATCH);
    let mut flush =
        |batch: &mut Vec<(usize, BoolFun)>, dist: &mut RelDegDistribution| -> Result<()> {
            let records = batch
                .par_iter()
                .map(|(id, f)| classify_record(*id, f, opts, cache))
                .collect::<Result<Vec<_>>>()?;
            for rec in &records {
                dist.record(rec.m, &rec.rel_degrees)?;
                sink(rec)?;
            }
            batch.clear();
            Ok(())
        };
    for (i, line) in reader.lines().enumerate() {
        let id = i + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let at_line = |e: Error| Error::Line {
            line: id,
            source: Box::new(e),
        };
        let mut f = parse_function(text, opts.format, m).map_err(at_line)?;
        match m {
            Some(expected) if expected != f.m() => {
                return Err(at_line(Error::DimensionMismatch {
                    expected,
                    got: f.m(),
                }))
            }
            _ => m = Some(f.m()),
        }
        if let Some(perm) = &opts.permutation {
            f = f.permute_vars(perm).map_err(at_line)?;
        }
        batch.push((id, f));
        if batch.len() == SCAN_BATCH {
            flush(&mut batch, &mut dist)?;
        }
    }
    flush(&mut batch, &mut dist)?;
    Ok(dist)
}

fn classify_record(
    id: usize,
    f: &BoolFun,
    opts: &ScanOptions,
    cache: &FlatTableCache,
) -> Result<FunctionRecord> {
    let at_line = |e: Error| Error::Line {
        line: id,
        source: Box::new(e),
    };
    let report = classify_normality(f, cache, opts.method).map_err(at_line)?;
    let rel_degrees = opts
        .dims
        .iter()
        .map(|&r| Ok((r, r_degree(f, r, &*cache.get(f.m(), r)?)?)))
        .collect::<Result<Vec<_>>>()
        .map_err(at_line)?;
    Ok(FunctionRecord {
        id,
        m: f.m(),
        degree: f.degree(),
        report,
        rel_degrees,
    })
}

/// [`scan_reader`] over a file.
pub fn scan_file(
    path: impl AsRef<Path>,
    opts: &ScanOptions,
    cache: &FlatTableCache,
    sink: impl FnMut(&FunctionRecord) -> Result<()>,
) -> Result<RelDegDistribution> {
    scan_reader(BufReader::new(File::open(path)?), opts, cache, sink)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reldeg::Normality;

    #[test]
    fn work_factor_full_space() {
        for m in 1..=8 {
            let w = work_factor(m, 1, m, m, 17).unwrap();
            assert_eq!(w.value, (17 * m as u128) << m);
        }
        assert!(work_factor(4, 1, 6, 6, 0).is_err());
        assert!(work_factor(7, 1, 6, 6, 1).is_err());
    }

    #[test]
    fn class_count_lookup() {
        assert_eq!(known_class_count(2, 3, 8), Some(20_748));
        assert_eq!(known_class_count(1, 6, 6), Some(7_888_299));
        assert_eq!(known_class_count(2, 4, 7), None);
    }

    #[test]
    fn m5_kernel_agrees_with_oracle() {
        let kernel = M5Kernel::new().unwrap();
        let t2 = FlatTable::build(5, 2).unwrap();
        for counter in (0..1u32 << 26).step_by(104_729) {
            let table = bits::moebius_word(u64::from(kernel.anf_of(counter)), 5) as u32;
            let f = M5Kernel::bool_fun(table);
            assert!(DegreeBand::new(2, 5).contains(&f.anf()));
            let t = M5Kernel::translations(table);
            let oracle3 = r_degree(&f, 3, &kernel.table3).unwrap();
            let fast3 = match kernel.deg3(&t) {
                Deg3::Zero => 0,
                Deg3::One => 1,
                Deg3::AtLeastTwo => 2,
            };
            assert_eq!(fast3, oracle3.min(2));
            assert_eq!(kernel.deg2_is_zero(&t), r_degree(&f, 2, &t2).unwrap() == 0);
        }
        let q = Anf::parse("x1*x3 + x2*x4 + x5", 5).unwrap().truth_table();
        let t = M5Kernel::translations(q.words()[0] as u32);
        assert_eq!(kernel.deg3(&t), Deg3::One);
    }

    #[test]
    fn affine_tables() {
        assert_eq!(affine_table_m5(0), 0);
        assert_eq!(affine_table_m5(32), u32::MAX);
        assert_eq!(affine_table_m5(1), 0xAAAA_AAAA);
    }

    #[test]
    fn random_lower_bound_is_reproducible() {
        let t = FlatTable::build(5, 3).unwrap();
        let band = DegreeBand::new(2, 2);
        let a = random_lower_bound(5, 3, band, 1, 42, &t, &[]).unwrap();
        let b = random_lower_bound(5, 3, band, 1, 42, &t, &[]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mode, EntryMode::LowerBound);
        assert_eq!(a.seed, Some(42));
        assert!(random_lower_bound(5, 3, band, 0, 42, &t, &[]).is_err());
        let w = a.witness.unwrap();
        assert_eq!(r_degree(&w, 3, &t).unwrap(), a.value);
    }

    #[test]
    fn random_lower_bound_with_base() {
        let t = FlatTable::build(5, 3).unwrap();
        let base = [Anf::parse("x1*x2*x3*x4", 5).unwrap().truth_table()];
        let e = random_lower_bound(5, 3, DegreeBand::new(2, 3), 50, 3, &t, &base).unwrap();
        assert_eq!(e.k, 4);
        let w = e.witness.unwrap();
        assert!(w.degree() <= 4);
        assert_eq!(r_degree(&w, 3, &t).unwrap(), e.value);
    }

    #[test]
    fn hex_var_inference() {
        assert_eq!(hex_vars(2), Some(3));
        assert_eq!(hex_vars(64), Some(8));
        assert_eq!(hex_vars(6), None);
        assert_eq!(hex_vars(3), None);
    }

    #[test]
    fn scan_reports_and_errors() {
        let cache = FlatTableCache::new();
        let opts = ScanOptions {
            m: Some(5),
            dims: vec![3],
            ..Default::default()
        };
        let input = "# quadrics\nx1*x3 + x2*x4 + x5\n\n0\n";
        let mut records = Vec::new();
        let dist = scan_reader(input.as_bytes(), &opts, &cache, |r| {
            records.push(r.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].id, 2);
        assert_eq!(records[0].report.status, Normality::WeaklyNormal);
        assert_eq!(records[1].report.status, Normality::Normal);
        assert_eq!(dist.row(3).unwrap(), [1, 1, 0, 0]);
        let json = records[0].to_json();
        assert_eq!(json["status"], "WeaklyNormal");
        assert_eq!(json["deg_r"]["3"], 1);

        let err = scan_reader("x1\nx7\n".as_bytes(), &opts, &cache, |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Line { line: 2, .. }), "{err}");

        let hex = ScanOptions {
            format: InputFormat::Hex,
            ..Default::default()
        };
        let err = scan_reader("0f\n00ff\n".as_bytes(), &hex, &cache, |_| Ok(())).unwrap_err();
        assert!(matches!(err, Error::Line { line: 2, .. }), "{err}");

        let empty = scan_reader("".as_bytes(), &opts, &cache, |_| Ok(())).unwrap();
        assert_eq!(empty.total, 0);
    }
}
