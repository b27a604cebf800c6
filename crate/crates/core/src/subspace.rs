//! Linear subspaces and affine flats of `F_2^m`.
//!
//! A subspace is stored by its reduced row echelon basis. The pivot of a
//! basis vector is its most significant set bit, pivots are distinct, and
//! every pivot column is clear in the other basis vectors. Basis vectors are
//! kept in increasing pivot order. Coset representatives are reduced: zero
//! in every pivot coordinate.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::boolfun::MAX_VARS;
use crate::error::{Error, Result};

/// Default bound on the number of subspaces an enumeration may produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 26;

/// Number of `r`-dimensional subspaces of `F_2^m`.
pub fn gaussian_binomial(m: usize, r: usize) -> Result<u64> {
    if m > MAX_VARS {
        return Err(Error::VariableCount(m));
    }
    if r > m {
        return Err(Error::Dimension { m, r });
    }
    // [m, k] = [m, k-1] (2^(m-k+1) - 1) / (2^k - 1); every quotient is exact,
    // and [m, r] = [m, m-r] keeps the intermediates increasing.
    let mut acc: u128 = 1;
    for k in 1..=r.min(m - r) {
        acc = acc * ((1u128 << (m - k + 1)) - 1) / ((1u128 << k) - 1);
        if acc > u128::from(u64::MAX) {
            return Err(Error::Overflow(format!("gaussian_binomial({m}, {r})")));
        }
    }
    Ok(acc as u64)
}

#[inline]
fn pivot(v: u32) -> u32 {
    31 - v.leading_zeros()
}

/// A linear subspace in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSubspace {
    m: usize,
    basis: Vec<u32>,
}

impl LinearSubspace {
    /// Canonical form of the span of `vectors`.
    pub fn span(m: usize, vectors: &[u32]) -> Result<Self> {
        if m == 0 || m > MAX_VARS {
            return Err(Error::VariableCount(m));
        }
        let mut basis: Vec<u32> = Vec::new();
        for &v in vectors {
            if v >> m != 0 {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: 32 - v.leading_zeros() as usize,
                });
            }
            let v = reduce_by(&basis, v);
            if v == 0 {
                continue;
            }
            let p = 1u32 << pivot(v);
            for b in basis.iter_mut() {
                if *b & p != 0 {
                    *b ^= v;
                }
            }
            basis.push(v);
        }
        basis.sort_unstable_by_key(|&b| pivot(b));
        Ok(Self { m, basis })
    }

    /// The zero subspace.
    pub fn trivial(m: usize) -> Result<Self> {
        Self::span(m, &[])
    }

    pub fn full(m: usize) -> Result<Self> {
        Self::span(m, &(0..m).map(|j| 1u32 << j).collect::<Vec<_>>())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn pivot_mask(&self) -> u32 {
        self.basis.iter().fold(0, |acc, &b| acc | 1 << pivot(b))
    }

    /// Reduces `v` modulo the subspace: the result is zero in all pivot
    /// coordinates and lies in the coset `v + V`.
    #[inline]
    pub fn reduce(&self, v: u32) -> u32 {
        reduce_by(&self.basis, v)
    }

    pub fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }

    /// Points of `V`: point `j` is the sum of the basis vectors selected by
    /// the bits of `j`.
    pub fn points(&self) -> Vec<u32> {
        points_of(&self.basis)
    }

    /// Reduced coset representatives in increasing order.
    pub fn coset_reps(&self) -> Vec<u32> {
        reps_of(self.m, self.pivot_mask())
    }

    /// The `2^(m-r)` cosets of `V`, partitioning `F_2^m`.
    pub fn cosets(&self) -> Vec<AffineFlat> {
        self.coset_reps()
            .into_iter()
            .map(|rep| AffineFlat {
                subspace: self.clone(),
                rep,
            })
            .collect()
    }
}

#[inline]
fn reduce_by(basis: &[u32], mut v: u32) -> u32 {
    for &b in basis {
        if v & (1 << pivot(b)) != 0 {
            v ^= b;
        }
    }
    v
}

fn points_of(basis: &[u32]) -> Vec<u32> {
    let n = 1usize << basis.len();
    let mut pts = vec![0u32; n];
    for j in 1..n {
        pts[j] = pts[j & (j - 1)] ^ basis[j.trailing_zeros() as usize];
    }
    pts
}

fn reps_of(m: usize, pivots: u32) -> Vec<u32> {
    let free = ((1u32 << m) - 1) & !pivots;
    let mut reps = Vec::with_capacity(1 << free.count_ones());
    let mut s = 0u32;
    loop {
        reps.push(s);
        if s == free {
            break;
        }
        s = s.wrapping_sub(free) & free;
    }
    reps
}

/// An affine flat `a + V` with `a` reduced modulo `V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineFlat {
    subspace: LinearSubspace,
    rep: u32,
}

impl AffineFlat {
    pub fn new(subspace: LinearSubspace, point: u32) -> Result<Self> {
        if point >> subspace.m != 0 {
            return Err(Error::DimensionMismatch {
                expected: subspace.m,
                got: 32 - point.leading_zeros() as usize,
            });
        }
        let rep = subspace.reduce(point);
        Ok(Self { subspace, rep })
    }

    /// The single point `{p}` as a 0-dimensional flat.
    pub fn point(m: usize, p: u32) -> Result<Self> {
        Self::new(LinearSubspace::trivial(m)?, p)
    }

    pub fn subspace(&self) -> &LinearSubspace {
        &self.subspace
    }

    pub fn rep(&self) -> u32 {
        self.rep
    }

    pub fn m(&self) -> usize {
        self.subspace.m
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Point `j` is `rep + sum of basis_i over the bits i of j`.
    pub fn points(&self) -> Vec<u32> {
        let mut pts = self.subspace.points();
        pts.iter_mut().for_each(|p| *p ^= self.rep);
        pts
    }

    pub fn contains(&self, x: u32) -> bool {
        x >> self.m() == 0 && self.subspace.reduce(x) == self.rep
    }
}

/// Streams the `r`-dimensional subspaces of `F_2^m` in canonical order:
/// pivot sets in lexicographic order, then free entries as a binary counter.
#[derive(Debug)]
pub struct SubspaceIter {
    m: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, u32)>,
    counter: u64,
    done: bool,
}

impl SubspaceIter {
    fn new(m: usize, r: usize) -> Self {
        let mut it = Self {
            m,
            pivots: (0..r).collect(),
            free: Vec::new(),
            counter: 0,
            done: false,
        };
        it.load_free();
        it
    }

    fn load_free(&mut self) {
        self.free.clear();
        for (i, &p) in self.pivots.iter().enumerate() {
            for bit in 0..p {
                if !self.pivots.contains(&bit) {
                    self.free.push((i, bit as u32));
                }
            }
        }
    }

    fn next_pivots(&mut self) -> bool {
        let r = self.pivots.len();
        let m = self.m;
        let Some(i) = (0..r).rev().find(|&i| self.pivots[i] < m - r + i) else {
            return false;
        };
        self.pivots[i] += 1;
        for j in i + 1..r {
            self.pivots[j] = self.pivots[j - 1] + 1;
        }
        true
    }
}

impl Iterator for SubspaceIter {
    type Item = LinearSubspace;

    fn next(&mut self) -> Option<LinearSubspace> {
        if self.done {
            return None;
        }
        let mut basis: Vec<u32> = self.pivots.iter().map(|&p| 1u32 << p).collect();
        for (k, &(i, bit)) in self.free.iter().enumerate() {
            if (self.counter >> k) & 1 == 1 {
                basis[i] |= 1 << bit;
            }
        }
        self.counter += 1;
        if self.counter >> self.free.len() != 0 {
            self.counter = 0;
            if self.next_pivots() {
                self.load_free();
            } else {
                self.done = true;
            }
        }
        Some(LinearSubspace { m: self.m, basis })
    }
}

pub fn enumerate_subspaces(m: usize, r: usize) -> Result<SubspaceIter> {
    enumerate_subspaces_capped(m, r, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_subspaces_capped(m: usize, r: usize, cap: u64) -> Result<SubspaceIter> {
    if m == 0 {
        return Err(Error::VariableCount(m));
    }
    let count = gaussian_binomial(m, r)?;
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    Ok(SubspaceIter::new(m, r))
}

/// Every `r`-dimensional subspace of `F_2^m` with its point list and coset
/// representatives, stored flat for scanning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatTable {
    m: usize,
    r: usize,
    bases: Vec<u32>,
    offsets: Vec<u32>,
    reps: Vec<u32>,
    count: usize,
}

const MAGIC: &[u8; 4] = b"BFLT";
const VERSION: u32 = 1;

impl FlatTable {
    pub fn build(m: usize, r: usize) -> Result<Self> {
        Self::build_capped(m, r, DEFAULT_ENUMERATION_CAP)
    }

    pub fn build_capped(m: usize, r: usize, cap: u64) -> Result<Self> {
        let spaces = enumerate_subspaces_capped(m, r, cap)?;
        let count = gaussian_binomial(m, r)? as usize;
        let mut table = Self::with_capacity(m, r, count);
        for v in spaces {
            table.push(&v.basis);
        }
        debug_assert_eq!(table.count, count);
        Ok(table)
    }

    fn with_capacity(m: usize, r: usize, count: usize) -> Self {
        Self {
            m,
            r,
            bases: Vec::with_capacity(count * r),
            offsets: Vec::with_capacity(count << r),
            reps: Vec::with_capacity(count << (m - r)),
            count: 0,
        }
    }

    fn push(&mut self, basis: &[u32]) {
        self.bases.extend_from_slice(basis);
        self.offsets.extend(points_of(basis));
        let pivots = basis.iter().fold(0, |acc, &b| acc | 1 << pivot(b));
        self.reps.extend(reps_of(self.m, pivots));
        self.count += 1;
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn space_count(&self) -> usize {
        self.count
    }

    pub fn cosets_per_space(&self) -> usize {
        1 << (self.m - self.r)
    }

    pub fn flat_count(&self) -> u64 {
        (self.count as u64) << (self.m - self.r)
    }

    pub fn basis(&self, i: usize) -> &[u32] {
        &self.bases[i * self.r..(i + 1) * self.r]
    }

    /// The `2^r` points of space `i`.
    pub fn offsets(&self, i: usize) -> &[u32] {
        &self.offsets[i << self.r..(i + 1) << self.r]
    }

    pub fn reps(&self, i: usize) -> &[u32] {
        let n = self.cosets_per_space();
        &self.reps[i * n..(i + 1) * n]
    }

    pub fn space(&self, i: usize) -> LinearSubspace {
        LinearSubspace {
            m: self.m,
            basis: self.basis(i).to_vec(),
        }
    }

    pub fn flat(&self, space: usize, coset: usize) -> AffineFlat {
        AffineFlat {
            subspace: self.space(space),
            rep: self.reps(space)[coset],
        }
    }

    /// Fails unless the table covers dimension `r` of `F_2^m`.
    pub fn check(&self, m: usize, r: usize) -> Result<()> {
        if self.m != m || self.r != r {
            return Err(Error::TableMismatch {
                table_m: self.m,
                table_r: self.r,
                m,
                r,
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.m as u32).to_le_bytes())?;
        w.write_all(&(self.r as u32).to_le_bytes())?;
        w.write_all(&(self.count as u64).to_le_bytes())?;
        for i in 0..self.count {
            for &b in self.basis(i) {
                w.write_all(&b.to_le_bytes())?;
            }
            for &rep in self.reps(i) {
                w.write_all(&rep.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut rd: R) -> Result<Self> {
        let corrupt = |msg: &str| Error::CorruptTable(msg.to_string());
        let mut magic = [0u8; 4];
        rd.read_exact(&mut magic)
            .map_err(|_| corrupt("truncated header"))?;
        if &magic != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = read_u32(&mut rd)?;
        if version != VERSION {
            return Err(Error::CorruptTable(format!(
                "unsupported version {version}"
            )));
        }
        let m = read_u32(&mut rd)? as usize;
        let r = read_u32(&mut rd)? as usize;
        if m == 0 || m > MAX_VARS || r > m {
            return Err(Error::CorruptTable(format!(
                "invalid dimensions m={m}, r={r}"
            )));
        }
        let count = read_u64(&mut rd)?;
        let expected = gaussian_binomial(m, r)?;
        if count != expected {
            return Err(Error::CorruptTable(format!(
                "space count {count} does not match gaussian_binomial({m}, {r}) = {expected}"
            )));
        }
        let count = count as usize;
        let ncosets = 1usize << (m - r);
        let mut table = Self::with_capacity(m, r, count);
        let mut seen = HashSet::with_capacity(count);
        let mut basis = vec![0u32; r];
        let mut reps = vec![0u32; ncosets];
        for i in 0..count {
            for b in basis.iter_mut() {
                *b = read_u32(&mut rd)?;
            }
            for rep in reps.iter_mut() {
                *rep = read_u32(&mut rd)?;
            }
            let canonical = LinearSubspace::span(m, &basis)
                .map_err(|_| Error::CorruptTable(format!("space {i}: basis out of range")))?;
            if canonical.basis != basis {
                return Err(Error::CorruptTable(format!(
                    "space {i}: basis not canonical"
                )));
            }
            if !seen.insert(canonical.basis) {
                return Err(Error::CorruptTable(format!(
                    "space {i}: duplicate subspace"
                )));
            }
            table.push(&basis);
            if table.reps(i) != reps.as_slice() {
                return Err(Error::CorruptTable(format!(
                    "space {i}: coset representatives do not match the basis"
                )));
            }
        }
        let mut rest = [0u8; 1];
        if rd.read(&mut rest)? != 0 {
            return Err(corrupt("trailing data after last space"));
        }
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

fn read_u32<R: Read>(rd: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    rd.read_exact(&mut buf)
        .map_err(|_| Error::CorruptTable("unexpected end of file".into()))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(rd: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    rd.read_exact(&mut buf)
        .map_err(|_| Error::CorruptTable("unexpected end of file".into()))?;
    Ok(u64::from_le_bytes(buf))
}

/// Builds flat tables on first use and shares them afterwards. With a
/// directory set, tables named `flats_m{m}_r{r}.bflt` are loaded from it
/// when present and written to it after a build.
#[derive(Debug, Default)]
pub struct FlatTableCache {
    dir: Option<PathBuf>,
    tables: Mutex<HashMap<(usize, usize), Arc<FlatTable>>>,
}

impl FlatTableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
            tables: Mutex::default(),
        }
    }

    pub fn file_name(m: usize, r: usize) -> String {
        format!("flats_m{m}_r{r}.bflt")
    }

    /// Registers an externally loaded table.
    pub fn insert(&self, table: FlatTable) -> Arc<FlatTable> {
        let table = Arc::new(table);
        self.tables
            .lock()
            .unwrap()
            .insert((table.m, table.r), table.clone());
        table
    }

    pub fn get(&self, m: usize, r: usize) -> Result<Arc<FlatTable>> {
        if let Some(t) = self.tables.lock().unwrap().get(&(m, r)) {
            return Ok(t.clone());
        }
        let table = match &self.dir {
            Some(dir) => {
                let path = dir.join(Self::file_name(m, r));
                if path.exists() {
                    let t = FlatTable::load(&path)?;
                    t.check(m, r)?;
                    t
                } else {
                    let t = FlatTable::build(m, r)?;
                    std::fs::create_dir_all(dir)?;
                    t.save(&path)?;
                    t
                }
            }
            None => FlatTable::build(m, r)?,
        };
        Ok(self.insert(table))
    }
}
