//! Square-tiled surfaces encoded as permutation pairs.
//!
//! Square `i` has right neighbour `h(i)` and upper neighbour `v(i)`. Two pairs
//! describe the same surface iff they are simultaneously conjugate.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Origami {
    h: Permutation,
    v: Permutation,
}

impl Origami {
    pub fn new(h: Permutation, v: Permutation) -> Result<Self> {
        if h.len() != v.len() {
            return Err(Error::DegreeMismatch(h.len(), v.len()));
        }
        if h.is_empty() {
            return Err(Error::NotTransitive);
        }
        let o = Self { h, v };
        if !o.is_transitive() {
            return Err(Error::NotTransitive);
        }
        Ok(o)
    }

    pub fn from_images(h: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        Self::new(Permutation::from_images(h)?, Permutation::from_images(v)?)
    }

    pub fn torus() -> Self {
        Self {
            h: Permutation::identity(1),
            v: Permutation::identity(1),
        }
    }

    /// The three-square L: a horizontal strip of three squares with the first
    /// two glued vertically.
    pub fn l_shape() -> Self {
        Self::from_images(vec![1, 2, 0], vec![1, 0, 2]).expect("valid L")
    }

    pub(crate) fn new_unchecked(h: Permutation, v: Permutation) -> Self {
        debug_assert!(Self::new(h.clone(), v.clone()).is_ok());
        Self { h, v }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &Permutation {
        &self.h
    }

    pub fn v(&self) -> &Permutation {
        &self.v
    }

    fn is_transitive(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in [self.h.apply(x), self.v.apply(x)] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    /// `h v h⁻¹ v⁻¹`.
    pub fn commutator(&self) -> Permutation {
        let hi = self.h.inverse();
        let vi = self.v.inverse();
        self.h.compose(&self.v.compose(&hi.compose(&vi)))
    }

    pub fn commutator_cycle_type(&self) -> Vec<usize> {
        self.commutator().cycle_type()
    }

    pub fn stratum(&self) -> StratumSignature {
        StratumSignature::from_commutator_type(self.n(), &self.commutator_cycle_type())
    }

    pub fn genus(&self) -> usize {
        self.stratum().genus
    }

    /// `(s h s⁻¹, s v s⁻¹)`.
    pub fn conjugate(&self, s: &Permutation) -> Self {
        Self {
            h: self.h.conjugate_by(s),
            v: self.v.conjugate_by(s),
        }
    }

    pub fn act(&self, g: Sl2Generator) -> Self {
        match g {
            Sl2Generator::T => Self {
                h: self.h.clone(),
                v: self.v.compose(&self.h.inverse()),
            },
            Sl2Generator::S => Self {
                h: self.v.clone(),
                v: self.h.inverse(),
            },
        }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let n = self.n();
        assert!(n <= 256, "canonical keys use one byte per square");
        let hi = self.h.inverse();
        let vi = self.v.inverse();
        let mut best: Option<Vec<u8>> = None;
        let mut label = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut enc = vec![0u8; 2 * n];
        for start in 0..n {
            label.iter_mut().for_each(|l| *l = usize::MAX);
            order.clear();
            label[start] = 0;
            order.push(start);
            let mut head = 0;
            while head < order.len() {
                let x = order[head];
                head += 1;
                for y in [self.h.apply(x), self.v.apply(x), hi.apply(x), vi.apply(x)] {
                    if label[y] == usize::MAX {
                        label[y] = order.len();
                        order.push(y);
                    }
                }
            }
            for (new, &old) in order.iter().enumerate() {
                enc[new] = label[self.h.apply(old)] as u8;
                enc[n + new] = label[self.v.apply(old)] as u8;
            }
            if best.as_deref().is_none_or(|b| enc.as_slice() < b) {
                best = Some(enc.clone());
            }
        }
        CanonicalKey(best.expect("nonempty surface"))
    }

    /// The representative of this surface's isomorphism class whose encoding
    /// is its canonical key.
    pub fn canonical_form(&self) -> Self {
        self.canonical_key().to_origami()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Sl2Generator {
    S,
    T,
}

impl Sl2Generator {
    pub const ALL: [Sl2Generator; 2] = [Sl2Generator::S, Sl2Generator::T];
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StratumSignature {
    /// Orders of the zeros of the differential, in decreasing order.
    pub zero_orders: Vec<usize>,
    pub genus: usize,
}

impl StratumSignature {
    pub fn from_commutator_type(n: usize, cycle_type: &[usize]) -> Self {
        let c = cycle_type.len();
        debug_assert!((n - c).is_multiple_of(2));
        let genus = 1 + (n - c) / 2;
        let mut zero_orders: Vec<usize> = cycle_type.iter().filter(|&&l| l > 1).map(|&l| l - 1).collect();
        zero_orders.sort_unstable_by(|a, b| b.cmp(a));
        Self { zero_orders, genus }
    }

    pub fn stratum(&self) -> Option<Stratum> {
        match self.zero_orders.as_slice() {
            [2] => Some(Stratum::H2),
            [1, 1] => Some(Stratum::H11),
            _ => None,
        }
    }
}

/// The two genus-two strata.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stratum {
    H2,
    H11,
}

impl Stratum {
    pub fn name(self) -> &'static str {
        match self {
            Stratum::H2 => "H2",
            Stratum::H11 => "H11",
        }
    }

    /// Number of points moved by the commutator.
    pub fn moved_points(self) -> usize {
        match self {
            Stratum::H2 => 3,
            Stratum::H11 => 4,
        }
    }

    pub fn min_squares(self) -> usize {
        match self {
            Stratum::H2 => 3,
            Stratum::H11 => 4,
        }
    }

    pub fn zero_count(self) -> usize {
        match self {
            Stratum::H2 => 1,
            Stratum::H11 => 2,
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Stratum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace(['(', ')', ','], "").as_str() {
            "H2" => Ok(Stratum::H2),
            "H11" => Ok(Stratum::H11),
            _ => Err(Error::InvalidParameters(format!("unknown stratum {s:?}"))),
        }
    }
}

/// Byte encoding `h'(0..n) ++ v'(0..n)` of the lexicographically least BFS
/// relabelling. Equal keys iff the surfaces are isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn to_origami(&self) -> Origami {
        let n = self.n();
        let h = self.0[..n].iter().map(|&x| x as usize).collect();
        let v = self.0[n..].iter().map(|&x| x as usize).collect();
        Origami::new_unchecked(
            Permutation::from_images_unchecked(h),
            Permutation::from_images_unchecked(v),
        )
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if !s.len().is_multiple_of(2) {
            return None;
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).ok())
            .collect::<Option<Vec<u8>>>()
            .map(CanonicalKey)
    }
}

/// SL2(Z)-orbits of a set of surfaces, labelled by their minimal key.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    /// For each input surface, the index of its orbit in `orbits`.
    pub orbit_of: Vec<usize>,
    /// Orbit ids (minimal canonical key) in increasing order.
    pub orbits: Vec<CanonicalKey>,
    pub sizes: Vec<usize>,
}

impl OrbitPartition {
    pub fn orbit_id(&self, i: usize) -> &CanonicalKey {
        &self.orbits[self.orbit_of[i]]
    }
}

/// Partitions surfaces into orbits under the S and T generators. Every image
/// must itself be a member of the input set.
pub fn orbit_partition(census: &[Origami]) -> Result<OrbitPartition> {
    let keys: Vec<CanonicalKey> = census.iter().map(Origami::canonical_key).collect();
    let index: HashMap<&CanonicalKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();

    let mut parent: Vec<usize> = (0..census.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for (i, o) in census.iter().enumerate() {
        for g in Sl2Generator::ALL {
            let image = o.act(g).canonical_key();
            let j = *index.get(&image).ok_or(Error::NotActionClosed)?;
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }

    let mut min_key: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..census.len() {
        let r = find(&mut parent, i);
        let e = min_key.entry(r).or_insert(i);
        if keys[i] < keys[*e] {
            *e = i;
        }
    }
    let mut ids: Vec<(CanonicalKey, usize)> = min_key.iter().map(|(&root, &rep)| (keys[rep].clone(), root)).collect();
    ids.sort();
    let root_to_orbit: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, (_, root))| (*root, k)).collect();

    let mut orbit_of = Vec::with_capacity(census.len());
    let mut sizes = vec![0; ids.len()];
    for i in 0..census.len() {
        let k = root_to_orbit[&find(&mut parent, i)];
        orbit_of.push(k);
        sizes[k] += 1;
    }
    Ok(OrbitPartition {
        orbit_of,
        orbits: ids.into_iter().map(|(k, _)| k).collect(),
        sizes,
    })
}

/// Closure of one surface under S and T, as a sorted list of canonical forms.
pub fn orbit_of(o: &Origami) -> Vec<Origami> {
    let mut seen: HashMap<CanonicalKey, Origami> = HashMap::new();
    let start = o.canonical_form();
    seen.insert(start.canonical_key(), start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in Sl2Generator::ALL {
            let y = x.act(g).canonical_form();
            let k = y.canonical_key();
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(k) {
                e.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<(CanonicalKey, Origami)> = seen.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, o)| o).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn commutator_types() {
        assert_eq!(Origami::torus().commutator_cycle_type(), vec![1]);
        let l = Origami::new(cyc(3, &[&[0, 1, 2]]), cyc(3, &[&[0, 1]])).unwrap();
        assert_eq!(l.commutator_cycle_type(), vec![3]);
        let o = Origami::new(cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 1]])).unwrap();
        assert_eq!(o.commutator_cycle_type(), vec![3, 1]);
        let o = Origami::new(cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 2]])).unwrap();
        assert_eq!(o.commutator_cycle_type(), vec![2, 2]);
        assert_eq!(o.stratum().stratum(), Some(Stratum::H11));
        assert_eq!(o.genus(), 2);
    }

    #[test]
    fn strata() {
        let t = Origami::torus().stratum();
        assert_eq!((t.genus, t.zero_orders.len()), (1, 0));
        let l = Origami::l_shape().stratum();
        assert_eq!((l.genus, l.zero_orders.clone()), (2, vec![2]));
    }

    #[test]
    fn rejects_disconnected_pairs() {
        let id = Permutation::identity(2);
        assert!(matches!(Origami::new(id.clone(), id), Err(Error::NotTransitive)));
    }

    #[test]
    fn keys_identify_relabellings_and_separate_classes() {
        let l = Origami::l_shape();
        let s = cyc(3, &[&[0, 2]]);
        assert_ne!(l.conjugate(&s), l);
        assert_eq!(l.conjugate(&s).canonical_key(), l.canonical_key());

        let a = Origami::new(cyc(2, &[&[0, 1]]), Permutation::identity(2)).unwrap();
        let b = Origami::new(Permutation::identity(2), cyc(2, &[&[0, 1]])).unwrap();
        assert_ne!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn canonical_form_round_trips() {
        let l = Origami::l_shape();
        let c = l.canonical_form();
        assert_eq!(c.canonical_key(), l.canonical_key());
        let hex = l.canonical_key().to_hex();
        assert_eq!(CanonicalKey::from_hex(&hex), Some(l.canonical_key()));
    }

    #[test]
    fn action_preserves_torus_and_stratum() {
        let t = Origami::torus();
        assert_eq!(t.act(Sl2Generator::T), t);
        let l = Origami::l_shape();
        for g in Sl2Generator::ALL {
            assert_eq!(l.act(g).stratum(), l.stratum());
        }
    }

    #[test]
    fn l_orbit_has_three_members() {
        let orbit = orbit_of(&Origami::l_shape());
        assert_eq!(orbit.len(), 3);
        let p = orbit_partition(&orbit).unwrap();
        assert_eq!(p.sizes, vec![3]);
        assert!(orbit_partition(&orbit[..2]).is_err());
    }
}
