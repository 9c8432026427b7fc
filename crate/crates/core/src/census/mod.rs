//! Exhaustive enumeration of genus-two square-tiled surfaces up to
//! isomorphism, with classification, bucketing, and comparison against the
//! closed counting formulas.

mod io;
mod keystore;

pub use io::{load_census, manifest_path, records_path, write_census, Manifest, ENUMERATOR_VERSION};
pub use keystore::KeyStore;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{self, Rational};
use crate::invariants::{self, SurfaceInvariants};
use crate::origami::{orbit_partition, CanonicalKey, Origami, Stratum};
use crate::perm::{cycle_type_representative, partitions, Permutation};

pub const DEFAULT_BOUND: usize = 12;

#[derive(Clone, Debug)]
pub struct EnumerateConfig {
    pub bound: usize,
    /// Keys held in memory per partition before a sorted run is spilled.
    pub spill_threshold: usize,
    pub spill_dir: Option<PathBuf>,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        Self {
            bound: DEFAULT_BOUND,
            spill_threshold: 1 << 22,
            spill_dir: None,
        }
    }
}

/// One representative per isomorphism class of transitive pairs on `n`
/// squares whose commutator has the cycle type of `stratum`, sorted by
/// canonical key. Each representative is its own canonical form.
pub fn enumerate(n: usize, stratum: Stratum, cfg: &EnumerateConfig) -> Result<Vec<Origami>> {
    if n > cfg.bound {
        return Err(Error::BoundExceeded { n, bound: cfg.bound });
    }
    if n < stratum.min_squares() {
        return Ok(Vec::new());
    }
    let reps: Vec<Vec<usize>> = partitions(n).into_iter().filter(|p| p[0] > 1).collect();
    let parts: Vec<Vec<Vec<u8>>> = reps
        .par_iter()
        .map(|p| enumerate_for_h(&cycle_type_representative(p), stratum, cfg))
        .collect::<Result<_>>()?;
    // Classes with different h cycle types are distinct, so the partitions
    // are disjoint and a plain merge suffices.
    let mut keys: Vec<Vec<u8>> = parts.into_iter().flatten().collect();
    keys.sort_unstable();
    Ok(keys.into_iter().map(|k| CanonicalKey(k).to_origami()).collect())
}

/// Depth-first search over `v` for a fixed `h`.
///
/// `c = h v h⁻¹ v⁻¹` fixes `v(y)` iff `v(h⁻¹ y) = h⁻¹ v(y)`, so the number of
/// points moved by `c` equals the number of `y` violating this relation. The
/// search assigns `v(0), v(1), ...` in order and prunes as soon as more
/// violations than the stratum allows have been decided.
fn enumerate_for_h(h: &Permutation, stratum: Stratum, cfg: &EnumerateConfig) -> Result<Vec<Vec<u8>>> {
    let n = h.len();
    let target = stratum.moved_points();
    let hs: Vec<usize> = h.images().to_vec();
    let hi: Vec<usize> = h.inverse().images().to_vec();
    let mut store = KeyStore::new(2 * n, cfg.spill_threshold, cfg.spill_dir.clone());
    let mut v = vec![usize::MAX; n];
    let mut used = vec![false; n];

    struct Search<'a> {
        n: usize,
        target: usize,
        hs: &'a [usize],
        hi: &'a [usize],
        h: &'a Permutation,
        stratum: Stratum,
    }

    impl Search<'_> {
        /// Violations decided by assigning `v(y)` (all `v(z)`, `z < y`, known).
        fn new_defects(&self, v: &[usize], y: usize) -> usize {
            let mut count = 0;
            let p = self.hi[y];
            if p <= y && v[p] != self.hi[v[y]] {
                count += 1;
            }
            let q = self.hs[y];
            if q < y && v[y] != self.hi[v[q]] {
                count += 1;
            }
            count
        }

        fn go(&self, y: usize, defects: usize, v: &mut [usize], used: &mut [bool], store: &mut KeyStore) -> Result<()> {
            if y == self.n {
                if defects == self.target {
                    self.leaf(v, store)?;
                }
                return Ok(());
            }
            for t in 0..self.n {
                if used[t] {
                    continue;
                }
                v[y] = t;
                let d = defects + self.new_defects(v, y);
                if d <= self.target {
                    used[t] = true;
                    self.go(y + 1, d, v, used, store)?;
                    used[t] = false;
                }
            }
            v[y] = usize::MAX;
            Ok(())
        }

        fn leaf(&self, v: &[usize], store: &mut KeyStore) -> Result<()> {
            let vp = Permutation::from_images_unchecked(v.to_vec());
            let Ok(o) = Origami::new(self.h.clone(), vp) else {
                return Ok(());
            };
            if o.stratum().stratum() == Some(self.stratum) {
                store.insert(o.canonical_key().0)?;
            }
            Ok(())
        }
    }

    let search = Search {
        n,
        target,
        hs: &hs,
        hi: &hi,
        h,
        stratum,
    };
    search.go(0, 0, &mut v, &mut used, &mut store)?;
    store.finish()
}

/// Reference enumerator: every pair in `S_n × S_n`, deduplicated by key.
pub fn enumerate_naive(n: usize, stratum: Stratum) -> Vec<Origami> {
    let perms = all_permutations(n);
    let mut keys = BTreeSet::new();
    for h in &perms {
        for v in &perms {
            if let Ok(o) = Origami::new(h.clone(), v.clone()) {
                if o.stratum().stratum() == Some(stratum) {
                    keys.insert(o.canonical_key());
                }
            }
        }
    }
    keys.into_iter().map(|k| k.to_origami()).collect()
}

pub fn all_permutations(n: usize) -> Vec<Permutation> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(Permutation::from_images_unchecked(prefix.clone()));
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CensusRecord {
    pub n: usize,
    pub h: Vec<usize>,
    pub v: Vec<usize>,
    pub stratum: Stratum,
    pub reduced: bool,
    pub d: Option<u64>,
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub epsilon: Option<u8>,
    pub orbit_id: Option<String>,
}

impl CensusRecord {
    pub fn origami(&self) -> Result<Origami> {
        Origami::from_images(self.h.clone(), self.v.clone())
    }

    fn new(o: &Origami, stratum: Stratum, inv: &SurfaceInvariants) -> Self {
        Self {
            n: o.n(),
            h: o.h().images().to_vec(),
            v: o.v().images().to_vec(),
            stratum,
            reduced: inv.reduced,
            d: inv.d,
            m: inv.m,
            epsilon: inv.epsilon,
            orbit_id: None,
        }
    }
}

/// All surfaces of one stratum with `n` squares.
#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub n: usize,
    pub stratum: Stratum,
    pub records: Vec<CensusRecord>,
}

impl Census {
    pub fn build(n: usize, stratum: Stratum, cfg: &EnumerateConfig) -> Result<Self> {
        let surfaces = enumerate(n, stratum, cfg)?;
        Self::from_surfaces(n, stratum, &surfaces)
    }

    /// Classifies the given canonical representatives and labels SL2(Z) orbits.
    pub fn from_surfaces(n: usize, stratum: Stratum, surfaces: &[Origami]) -> Result<Self> {
        let mut records: Vec<CensusRecord> = surfaces
            .par_iter()
            .map(|o| invariants::classify(o).map(|inv| CensusRecord::new(o, stratum, &inv)))
            .collect::<Result<_>>()?;
        let orbits = orbit_partition(surfaces)?;
        for (i, r) in records.iter_mut().enumerate() {
            r.orbit_id = Some(orbits.orbit_id(i).to_hex());
        }
        Ok(Self { n, stratum, records })
    }

    pub fn reduced(&self) -> impl Iterator<Item = &CensusRecord> {
        self.records.iter().filter(|r| r.reduced)
    }

    /// Orbit sizes keyed by orbit id.
    pub fn orbit_sizes(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            if let Some(id) = &r.orbit_id {
                *out.entry(id.clone()).or_insert(0) += 1;
            }
        }
        out
    }
}

/// Bucket key: stratum, degree, torsion order, spin. Buckets with even `M`
/// carry no spin.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Bucket {
    pub stratum: Stratum,
    pub d: u64,
    pub m: u64,
    pub epsilon: Option<u8>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountTable {
    pub buckets: BTreeMap<Bucket, u64>,
    /// Counts with each surface weighted by `1 / |Aut|`.
    pub weighted: BTreeMap<Bucket, Rational>,
    /// `(stratum, n) -> (reduced, all)` record counts.
    pub totals: BTreeMap<(Stratum, usize), (u64, u64)>,
}

impl CountTable {
    pub fn get(&self, stratum: Stratum, d: u64, m: u64, epsilon: Option<u8>) -> u64 {
        let epsilon = if m.is_multiple_of(2) { None } else { epsilon };
        self.buckets
            .get(&Bucket { stratum, d, m, epsilon })
            .copied()
            .unwrap_or(0)
    }

    pub fn merge(&mut self, other: CountTable) {
        for (k, c) in other.buckets {
            *self.buckets.entry(k).or_insert(0) += c;
        }
        for (k, w) in other.weighted {
            *self.weighted.entry(k).or_insert_with(|| formulas::int(0)) += w;
        }
        for (k, (r, a)) in other.totals {
            let e = self.totals.entry(k).or_insert((0, 0));
            e.0 += r;
            e.1 += a;
        }
    }
}

pub fn count(census: &Census) -> CountTable {
    let mut table = CountTable::default();
    let mut reduced = 0;
    for r in census.reduced() {
        let (d, m) = (r.d.expect("reduced"), r.m.expect("reduced"));
        let epsilon = if m % 2 == 0 { None } else { r.epsilon };
        let bucket = Bucket {
            stratum: census.stratum,
            d,
            m,
            epsilon,
        };
        *table.buckets.entry(bucket).or_insert(0) += 1;
        let aut = r
            .origami()
            .map(|o| invariants::translation_automorphisms(&o).len())
            .unwrap_or(1);
        *table.weighted.entry(bucket).or_insert_with(|| formulas::int(0)) += formulas::rat(1, aut as i64);
        reduced += 1;
    }
    table
        .totals
        .insert((census.stratum, census.n), (reduced, census.records.len() as u64));
    table
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    /// Proven formula: a mismatch is a failure.
    Theorem,
    /// Conjectural formula: a mismatch is a warning.
    Conjecture,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Bucket,
    KaniTotal,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub kind: CheckKind,
    pub stratum: Stratum,
    pub d: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub epsilon: Option<u8>,
    pub census: u64,
    /// Census count with each surface weighted by `1 / |Aut|`.
    pub census_weighted: String,
    pub formula: String,
    pub grade: Grade,
    pub matches: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn theorem_failures(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.matches && r.grade == Grade::Theorem)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.matches && r.grade == Grade::Conjecture)
    }

    pub fn passed(&self) -> bool {
        self.theorem_failures().next().is_none()
    }
}

fn as_count(x: &Rational) -> Option<u64> {
    if x.is_integer() {
        x.to_integer().to_u64()
    } else {
        None
    }
}

/// Compares census buckets for the given `(stratum, n)` with the closed
/// formulas. Every formula bucket is listed, and so is every census bucket
/// without a formula (with formula value 0).
pub fn verify(table: &CountTable, stratum: Stratum, n: usize) -> VerifyReport {
    let mut rows = Vec::new();
    let mut expected: BTreeMap<Bucket, (Rational, Grade)> = BTreeMap::new();
    let n64 = n as u64;
    match stratum {
        Stratum::H2 => {
            for eps in formulas::h2_spins(n64) {
                let value = formulas::count_w(n64, eps).expect("valid spin");
                expected.insert(
                    Bucket {
                        stratum,
                        d: n64,
                        m: 1,
                        epsilon: Some(eps),
                    },
                    (value, Grade::Theorem),
                );
            }
        }
        Stratum::H11 => {
            for m in (1..=n64).filter(|m| n64.is_multiple_of(*m)) {
                let d = n64 / m;
                if d < 2 {
                    continue;
                }
                let grade = if formulas::is_conjectural(d) {
                    Grade::Conjecture
                } else {
                    Grade::Theorem
                };
                for eps in formulas::spins(d, m) {
                    let value = formulas::count_t(d, m, eps).expect("valid spin");
                    expected.insert(
                        Bucket {
                            stratum,
                            d,
                            m,
                            epsilon: eps,
                        },
                        (value, grade),
                    );
                }
            }
        }
    }
    let census_keys: BTreeSet<Bucket> = table
        .buckets
        .keys()
        .filter(|b| b.stratum == stratum && b.d * b.m == n64)
        .copied()
        .collect();
    let all: BTreeSet<Bucket> = expected.keys().copied().chain(census_keys).collect();
    for b in all {
        let census = table.buckets.get(&b).copied().unwrap_or(0);
        let (value, grade) = expected.get(&b).cloned().unwrap_or_else(|| {
            let grade = if stratum == Stratum::H11 && formulas::is_conjectural(b.d) {
                Grade::Conjecture
            } else {
                Grade::Theorem
            };
            (formulas::int(0), grade)
        });
        let weighted = table.weighted.get(&b).cloned().unwrap_or_else(|| formulas::int(0));
        rows.push(VerifyRow {
            kind: CheckKind::Bucket,
            stratum,
            d: b.d,
            m: b.m,
            epsilon: b.epsilon,
            census,
            census_weighted: weighted.to_string(),
            formula: value.to_string(),
            grade,
            matches: as_count(&value) == Some(census),
        });
    }
    if stratum == Stratum::H11 {
        for m in (2..=n64).filter(|m| n64.is_multiple_of(*m)) {
            let d = n64 / m;
            if d < 2 {
                continue;
            }
            let in_cell = |b: &Bucket| b.stratum == stratum && b.d == d && b.m == m;
            let total: u64 = table.buckets.iter().filter(|(b, _)| in_cell(b)).map(|(_, c)| c).sum();
            let weighted = table
                .weighted
                .iter()
                .filter(|(b, _)| in_cell(b))
                .fold(formulas::int(0), |acc, (_, w)| acc + w);
            let value = formulas::kani_torsion_total(d, m);
            let grade = if formulas::is_conjectural(d) {
                Grade::Conjecture
            } else {
                Grade::Theorem
            };
            rows.push(VerifyRow {
                kind: CheckKind::KaniTotal,
                stratum,
                d,
                m,
                epsilon: None,
                census: total,
                census_weighted: weighted.to_string(),
                formula: value.to_string(),
                grade,
                matches: as_count(&value) == Some(total),
            });
        }
    }
    VerifyReport { rows }
}
