mod common;

use std::io::Write;

use bfnorm::fixtures::{dubuc, DUBUC_ANF};
use bfnorm::{
    apply_affine, classify_normality, distribution, dual_bent, gaussian_binomial, is_bent,
    known_class_count, maiorana_mcfarland, r_degree, random_lower_bound, scan_file, work_factor,
    AffineTransform, DegreeBand, EntryMode, FlatTable, FlatTableCache, FunctionRecord, Method,
    Normality, ScanOptions,
};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn gaussian_binomial_against_product_formula() {
    assert_eq!(gaussian_binomial(6, 4).unwrap(), 651);
    assert_eq!(common::gaussian_big(6, 4), BigUint::from(651u32));
    assert_eq!(common::gaussian_big(8, 3), BigUint::from(97_155u32));
    assert_eq!(common::gaussian_big(8, 4), BigUint::from(200_787u32));
}

#[test]
fn work_factors_match_big_integer_products() {
    let rows = [
        (4, 1, 5, 5),
        (4, 1, 6, 6),
        (4, 1, 3, 7),
        (4, 4, 7, 7),
        (5, 2, 3, 8),
        (4, 4, 4, 8),
    ];
    for (r, s, t, m) in rows {
        let n = known_class_count(s, t, m).unwrap();
        let w = work_factor(r, s, t, m, n).unwrap();
        let expected = BigUint::from(n)
            * (BigUint::from(1u32) << (m - r))
            * common::gaussian_big(m as u32, r as u32)
            * BigUint::from(r)
            * (BigUint::from(1u32) << r);
        assert_eq!(BigUint::from(w.value), expected, "({r},{s},{t},{m})");
    }
}

#[test]
fn dubuc_status_survives_random_affine_maps() {
    let cache = FlatTableCache::new();
    let f = dubuc();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..3 {
        // input-side action only: a linear output term can make an affine
        // restriction constant
        let g = AffineTransform::random_with_output(8, false, &mut rng).unwrap();
        let h = apply_affine(&f, &g).unwrap();
        let rep = classify_normality(&h, &cache, Method::Paired).unwrap();
        assert_eq!(rep.status, Normality::WeaklyNormal);
    }
}

#[test]
fn dual_of_dual_on_m6_bent_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let f = maiorana_mcfarland(3, &mut rng).unwrap();
        let d = dual_bent(&f).unwrap();
        assert!(is_bent(&d).unwrap());
        assert_eq!(dual_bent(&d).unwrap(), f);
    }
}

#[test]
fn random_search_examples() {
    let t53 = FlatTable::build(5, 3).unwrap();
    let e = random_lower_bound(5, 3, DegreeBand::new(2, 2), 10_000, 1, &t53, &[]).unwrap();
    assert_eq!(e.mode, EntryMode::LowerBound);
    assert!(e.value >= 1);
    // the exhaustive scan shows the maximum over B(5) is 1
    assert_eq!(e.value, 1);
    let w = e.witness.as_ref().unwrap();
    assert_eq!(r_degree(w, 3, &t53).unwrap(), e.value);

    let a = random_lower_bound(5, 3, DegreeBand::new(1, 5), 1, 9, &t53, &[]).unwrap();
    let b = random_lower_bound(5, 3, DegreeBand::new(1, 5), 1, 9, &t53, &[]).unwrap();
    assert_eq!(a, b);

    let t63 = FlatTable::build(6, 3).unwrap();
    let e = random_lower_bound(6, 3, DegreeBand::new(1, 6), 10_000, 2, &t63, &[]).unwrap();
    assert_eq!(e.value, 0);
}

#[test]
fn random_search_on_base_functions() {
    let t = FlatTable::build(8, 4).unwrap();
    let base = [dubuc()];
    let e = random_lower_bound(8, 4, DegreeBand::new(1, 1), 20, 3, &t, &base).unwrap();
    // adding a linear function keeps deg_4 at most 1
    assert!(e.value <= 1);
    assert_eq!(e.functions_scanned, 20);
    let w = e.witness.as_ref().unwrap();
    assert_eq!(r_degree(w, 4, &t).unwrap(), e.value);
    assert!(w.degree() == 6);
}

fn collect(
    path: &std::path::Path,
    opts: &ScanOptions,
) -> (Vec<FunctionRecord>, bfnorm::RelDegDistribution) {
    let cache = FlatTableCache::new();
    let mut out = Vec::new();
    let dist = scan_file(path, opts, &cache, |r: &FunctionRecord| {
        out.push(r.clone());
        Ok(())
    })
    .unwrap();
    (out, dist)
}

#[test]
fn scan_file_on_dubuc() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# the Dubuc function").unwrap();
    writeln!(
        file,
        "{}",
        DUBUC_ANF.split_whitespace().collect::<Vec<_>>().join(" ")
    )
    .unwrap();
    let opts = ScanOptions {
        m: Some(8),
        dims: vec![4],
        ..Default::default()
    };
    let (records, dist) = collect(file.path(), &opts);
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].id, 2);
    assert_eq!(records[0].report.status, Normality::WeaklyNormal);
    assert_eq!(dist.total, 1);
    assert_eq!(dist.row(4).unwrap(), &[0, 1, 0, 0, 0]);

    let direct = distribution([&dubuc()], &[4], &FlatTableCache::new()).unwrap();
    assert_eq!(direct, dist);
}

#[test]
fn scan_file_on_empty_input() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let opts = ScanOptions {
        m: Some(8),
        dims: vec![4],
        ..Default::default()
    };
    let (records, dist) = collect(file.path(), &opts);
    assert!(records.is_empty());
    assert_eq!(dist.total, 0);
}

#[test]
fn scan_file_on_bent_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for _ in 0..1000 {
        writeln!(
            file,
            "{}",
            maiorana_mcfarland(4, &mut rng).unwrap().to_hex()
        )
        .unwrap();
    }
    let opts = ScanOptions {
        format: bfnorm::InputFormat::Hex,
        ..Default::default()
    };
    let (records, dist) = collect(file.path(), &opts);
    assert_eq!(records.len(), 1000);
    assert_eq!(dist.m, Some(8));
    assert!(records
        .iter()
        .all(|r| r.report.status != Normality::Abnormal));
}

#[test]
fn scan_file_reports_line_numbers_and_mixed_m() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "00ff").unwrap();
    writeln!(file, "0f").unwrap();
    let opts = ScanOptions {
        format: bfnorm::InputFormat::Hex,
        ..Default::default()
    };
    let err = scan_file(file.path(), &opts, &FlatTableCache::new(), |_| Ok(())).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");

    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "x1*x2").unwrap();
    writeln!(file, "x1*x9").unwrap();
    let opts = ScanOptions {
        m: Some(4),
        ..Default::default()
    };
    let err = scan_file(file.path(), &opts, &FlatTableCache::new(), |_| Ok(())).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}

#[test]
fn permutation_option_renames_variables() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "x1*x2*x3 + x1*x4 + x5*x6").unwrap();
    let mut plain = tempfile::NamedTempFile::new().unwrap();
    writeln!(plain, "x6*x5*x4 + x6*x3 + x2*x1").unwrap();
    let opts = ScanOptions {
        m: Some(6),
        permutation: Some(vec![6, 5, 4, 3, 2, 1]),
        ..Default::default()
    };
    let (permuted, _) = collect(file.path(), &opts);
    let (direct, _) = collect(
        plain.path(),
        &ScanOptions {
            permutation: None,
            ..opts
        },
    );
    assert_eq!(permuted[0].degree, 3);
    assert_eq!(permuted[0].report, direct[0].report);
}
