use std::collections::BTreeSet;
use std::fs;

use g2census::census::{self, enumerate, enumerate_naive, load_census, records_path, write_census};
use g2census::{CanonicalKey, Census, EnumerateConfig, Error, Sl2Generator, Stratum};

const STRATA: [Stratum; 2] = [Stratum::H2, Stratum::H11];

#[test]
fn optimized_enumeration_matches_brute_force() {
    let cfg = EnumerateConfig::default();
    for stratum in STRATA {
        for n in 1..=5 {
            assert_eq!(
                enumerate(n, stratum, &cfg).unwrap(),
                enumerate_naive(n, stratum),
                "{stratum:?} n={n}"
            );
        }
    }
}

#[test]
fn spilling_does_not_change_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = EnumerateConfig {
        spill_threshold: 7,
        spill_dir: Some(dir.path().to_path_buf()),
        ..EnumerateConfig::default()
    };
    for stratum in STRATA {
        assert_eq!(
            enumerate(6, stratum, &cfg).unwrap(),
            enumerate(6, stratum, &EnumerateConfig::default()).unwrap()
        );
    }
}

#[test]
fn census_is_closed_under_sl2() {
    for stratum in STRATA {
        for n in 3..=7 {
            let census = Census::build(n, stratum, &EnumerateConfig::default()).unwrap();
            let keys: BTreeSet<CanonicalKey> = census
                .records
                .iter()
                .map(|r| r.origami().unwrap().canonical_key())
                .collect();
            for r in &census.records {
                let o = r.origami().unwrap();
                for g in Sl2Generator::ALL {
                    assert!(keys.contains(&o.act(g).canonical_key()));
                }
            }
        }
    }
}

#[test]
fn orbit_ids_are_shared_along_sl2_moves() {
    let census = Census::build(6, Stratum::H11, &EnumerateConfig::default()).unwrap();
    let id_of = |k: &CanonicalKey| {
        census
            .records
            .iter()
            .find(|r| &r.origami().unwrap().canonical_key() == k)
            .and_then(|r| r.orbit_id.clone())
            .unwrap()
    };
    for r in &census.records {
        let o = r.origami().unwrap();
        for g in Sl2Generator::ALL {
            assert_eq!(&id_of(&o.act(g).canonical_key()), r.orbit_id.as_ref().unwrap());
        }
    }
}

#[test]
fn counts_verify_through_eight_squares() {
    for stratum in STRATA {
        for n in 3..=8 {
            let census = Census::build(n, stratum, &EnumerateConfig::default()).unwrap();
            let report = census::verify(&census::count(&census), stratum, n);
            let failures: Vec<_> = report.theorem_failures().collect();
            assert!(failures.is_empty(), "{stratum:?} n={n}: {failures:?}");
        }
    }
}

#[test]
fn cache_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let census = Census::build(5, Stratum::H2, &EnumerateConfig::default()).unwrap();
    write_census(dir.path(), &census, serde_json::json!({"test": true})).unwrap();
    let loaded = load_census(dir.path(), Stratum::H2, 5).unwrap().unwrap();
    assert_eq!(loaded, census);
    assert!(load_census(dir.path(), Stratum::H2, 6).unwrap().is_none());

    let path = records_path(dir.path(), Stratum::H2, 5);
    let mut bytes = fs::read(&path).unwrap();
    bytes.truncate(bytes.len() / 2);
    fs::write(&path, bytes).unwrap();
    assert!(matches!(
        load_census(dir.path(), Stratum::H2, 5),
        Err(Error::CorruptCache { .. })
    ));
}
