//! Algebraic degree, relative degree and normality of Boolean functions in
//! up to 16 variables.
//!
//! Functions are carried as truth tables ([`BoolFun`]) and converted to
//! algebraic normal form ([`Anf`]) by the binary Möbius transform. Affine
//! flats of `F_2^m` are enumerated canonically ([`subspace`]) and scanned to
//! compute relative degrees and normality verdicts ([`reldeg`]).

mod bits;

pub mod affine;
pub mod boolfun;
pub mod error;
pub mod fixtures;
pub mod reldeg;
pub mod search;
pub mod spectra;
pub mod subspace;

pub use affine::{apply_affine, AffineTransform};
pub use boolfun::{
    parse_permutation, random_function, random_in_band, random_in_band_with, Anf, BoolFun,
    DegreeBand, MAX_VARS,
};
pub use error::{Error, Result};
pub use reldeg::{
    classify_normality, classify_normality_naive, classify_normality_paired, distribution,
    normality_dim, r_degree, r_degree_streaming, r_degree_with_witness, rel_degree, restrict,
    Method, Normality, NormalityReport, RelDegDistribution,
};
pub use search::{
    exhaustive_m5_rows, known_class_count, parse_function, random_lower_bound, scan_file,
    scan_reader, work_factor, DTableEntry, DegreeConstraint, EntryMode, ExhaustiveM5Report,
    FunctionRecord, InputFormat, ScanOptions, WorkFactor,
};
pub use spectra::{dual_bent, is_bent, maiorana_mcfarland, walsh_transform, WalshSpectrum};
pub use subspace::{
    enumerate_subspaces, enumerate_subspaces_capped, gaussian_binomial, AffineFlat, FlatTable,
    FlatTableCache, LinearSubspace,
};
