//! Theta characteristics for genus 2, the action of `Γ_{d²}` on them, and the
//! boundary vanishing orders of Hilbert theta functions.

pub mod boundary;
mod group;
pub mod numeric;

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::{int, rat, Rational};

pub use group::{elementary_generators, random_element, PseudoMatrix, SiegelMatrix};

/// A half-integral characteristic `[γ₁, γ₂]` with entries mod 2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ThetaCharacteristic {
    pub g1: [u8; 2],
    pub g2: [u8; 2],
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

impl ThetaCharacteristic {
    pub fn new(g1: [i64; 2], g2: [i64; 2]) -> Self {
        let m = |x: i64| x.rem_euclid(2) as u8;
        Self {
            g1: [m(g1[0]), m(g1[1])],
            g2: [m(g2[0]), m(g2[1])],
        }
    }

    /// All sixteen characteristics in lexicographic order.
    pub fn all() -> Vec<Self> {
        (0..16u8)
            .map(|b| Self {
                g1: [b >> 3 & 1, b >> 2 & 1],
                g2: [b >> 1 & 1, b & 1],
            })
            .collect()
    }

    pub fn parity(&self) -> Parity {
        if (self.g1[0] * self.g2[0] + self.g1[1] * self.g2[1]) % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }

    pub fn g1_i64(&self) -> [i64; 2] {
        [self.g1[0] as i64, self.g1[1] as i64]
    }

    pub fn g2_i64(&self) -> [i64; 2] {
        [self.g2[0] as i64, self.g2[1] as i64]
    }

    /// `[(0,1),(1,0)]`, fixed by the whole group when `d` is odd.
    pub fn invariant() -> Self {
        Self::new([0, 1], [1, 0])
    }
}

impl fmt::Display for ThetaCharacteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{}),({},{}))", self.g1[0], self.g1[1], self.g2[0], self.g2[1])
    }
}

impl Serialize for ThetaCharacteristic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `(d·γ̃₁, γ̃₂)` with `γ̃₁ = γ₁A`, `γ̃₂ = γ₂Bᵀ`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct BaseChangedCharacteristic {
    pub dg1: [i64; 2],
    pub g2t: [i64; 2],
}

/// The fixed basis `B = [[1,0],[1,d]]` of the order.
pub fn basis_b(d: u64) -> [[Rational; 2]; 2] {
    [[int(1), int(0)], [int(1), int(d as i64)]]
}

/// `A = B⁻¹`.
pub fn basis_a(d: u64) -> [[Rational; 2]; 2] {
    let d = d as i64;
    [[int(1), int(0)], [rat(-1, d), rat(1, d)]]
}

pub(crate) fn row_times(v: &[Rational; 2], m: &[[Rational; 2]; 2]) -> [Rational; 2] {
    [&v[0] * &m[0][0] + &v[1] * &m[1][0], &v[0] * &m[0][1] + &v[1] * &m[1][1]]
}

pub(crate) fn transpose(m: &[[Rational; 2]; 2]) -> [[Rational; 2]; 2] {
    [[m[0][0].clone(), m[1][0].clone()], [m[0][1].clone(), m[1][1].clone()]]
}

pub(crate) fn to_integer(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        i64::try_from(x.to_integer()).ok()
    } else {
        None
    }
}

/// `γ̃₁` and `γ̃₂` as elements of `K = Q ⊕ Q`.
pub fn tilde(g1: [i64; 2], g2: [i64; 2], d: u64) -> ([Rational; 2], [Rational; 2]) {
    let v1 = [int(g1[0]), int(g1[1])];
    let v2 = [int(g2[0]), int(g2[1])];
    (row_times(&v1, &basis_a(d)), row_times(&v2, &transpose(&basis_b(d))))
}

pub fn base_change(ch: &ThetaCharacteristic, d: u64) -> BaseChangedCharacteristic {
    let (t1, t2) = tilde(ch.g1_i64(), ch.g2_i64(), d);
    let dd = int(d as i64);
    let int_of = |x: Rational| to_integer(&x).expect("integral by construction");
    BaseChangedCharacteristic {
        dg1: [int_of(&t1[0] * &dd), int_of(&t1[1] * &dd)],
        g2t: [int_of(t2[0].clone()), int_of(t2[1].clone())],
    }
}

pub fn base_change_table(d: u64) -> Vec<(ThetaCharacteristic, BaseChangedCharacteristic)> {
    ThetaCharacteristic::all()
        .into_iter()
        .map(|c| (c, base_change(&c, d)))
        .collect()
}

fn require_level(d: u64) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameters(format!(
            "theta computations need d >= 3, got {d}"
        )));
    }
    Ok(())
}

/// Image of `γ` under `M`, computed on the Siegel side and again on the
/// base-changed side; the two must agree.
pub fn characteristic_action(m: &PseudoMatrix, ch: &ThetaCharacteristic, d: u64) -> Result<ThetaCharacteristic> {
    let s = m.verify(d)?;
    let (h1, h2) = s.act(ch.g1_i64(), ch.g2_i64());
    let (k1, k2) = m.act_tilde(ch.g1_i64(), ch.g2_i64(), d);
    assert_eq!((h1, h2), (k1, k2), "Siegel and base-changed actions disagree");
    Ok(ThetaCharacteristic::new(h1, h2))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimedOrbit {
    pub name: &'static str,
    pub members: Vec<ThetaCharacteristic>,
    /// The claimed set is exactly one computed orbit.
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub d: u64,
    pub orbits: Vec<Vec<ThetaCharacteristic>>,
    pub claimed: Vec<ClaimedOrbit>,
    pub sampled_elements: usize,
    /// Sampled elements that moved a characteristic out of its orbit.
    pub closure_violations: usize,
    pub matches: bool,
}

fn chars(list: &[([i64; 2], [i64; 2])]) -> Vec<ThetaCharacteristic> {
    let mut v: Vec<_> = list.iter().map(|&(a, b)| ThetaCharacteristic::new(a, b)).collect();
    v.sort();
    v
}

/// The displayed orbits of even characteristics.
pub fn claimed_orbits(d: u64) -> Vec<(&'static str, Vec<ThetaCharacteristic>)> {
    if d % 2 == 1 {
        vec![
            ("O3", chars(&[([0, 1], [1, 0])])),
            (
                "O1",
                chars(&[
                    ([0, 0], [0, 0]),
                    ([1, 0], [0, 0]),
                    ([0, 0], [1, 0]),
                    ([0, 1], [0, 0]),
                    ([0, 0], [0, 1]),
                    ([1, 0], [0, 1]),
                    ([1, 1], [0, 0]),
                    ([0, 0], [1, 1]),
                    ([1, 1], [1, 1]),
                ]),
            ),
        ]
    } else {
        vec![
            (
                "E0",
                chars(&[([0, 0], [0, 0]), ([1, 0], [0, 1]), ([1, 0], [0, 0]), ([0, 0], [0, 1])]),
            ),
            (
                "E2",
                chars(&[
                    ([1, 1], [0, 0]),
                    ([1, 1], [1, 1]),
                    ([0, 0], [1, 1]),
                    ([0, 1], [1, 0]),
                    ([0, 1], [0, 0]),
                    ([0, 0], [1, 0]),
                ]),
            ),
        ]
    }
}

/// Orbits of all sixteen characteristics under the group generated by the
/// elementary generators, checked for closure under `samples` random words.
pub fn orbit_decomposition_sampled(d: u64, samples: usize, seed: u64) -> Result<OrbitReport> {
    require_level(d)?;
    let mut gens = elementary_generators(d);
    gens.extend(gens.clone().iter().map(PseudoMatrix::inverse));
    let all = ThetaCharacteristic::all();
    let mut orbit_of = [usize::MAX; 16];
    let index = |c: &ThetaCharacteristic| all.iter().position(|x| x == c).expect("sixteen characteristics");
    let mut orbits = Vec::new();
    for start in &all {
        if orbit_of[index(start)] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = vec![*start];
        orbit_of[index(start)] = id;
        let mut i = 0;
        while i < orbit.len() {
            let c = orbit[i];
            for g in &gens {
                let img = characteristic_action(g, &c, d)?;
                if orbit_of[index(&img)] == usize::MAX {
                    orbit_of[index(&img)] = id;
                    orbit.push(img);
                }
            }
            i += 1;
        }
        orbit.sort();
        orbits.push(orbit);
    }

    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut closure_violations = 0;
    for _ in 0..samples {
        let g = random_element(d, &mut rng, 6);
        for c in &all {
            if orbit_of[index(&characteristic_action(&g, c, d)?)] != orbit_of[index(c)] {
                closure_violations += 1;
                break;
            }
        }
    }

    let claimed: Vec<ClaimedOrbit> = claimed_orbits(d)
        .into_iter()
        .map(|(name, members)| ClaimedOrbit {
            matches: orbits.contains(&members),
            name,
            members,
        })
        .collect();
    let matches = closure_violations == 0 && claimed.iter().all(|c| c.matches);
    Ok(OrbitReport {
        d,
        orbits,
        claimed,
        sampled_elements: samples,
        closure_violations,
        matches,
    })
}

pub fn orbit_decomposition(d: u64) -> Result<OrbitReport> {
    orbit_decomposition_sampled(d, 64, 0)
}

/// Order of `ϑ[γ̃]` along the boundary chart `D^{(i)}_{∞,k}`:
/// `min_s ½(s+dη)² + k(s+dη)` with `η = γ̃₁^{(i)}/2`.
pub fn vanishing_order(ch: &ThetaCharacteristic, i: usize, k: i64, d: u64) -> Result<Rational> {
    require_level(d)?;
    if !(1..=2).contains(&i) {
        return Err(Error::InvalidParameters(format!(
            "boundary index must be 1 or 2, got {i}"
        )));
    }
    let shift = rat(base_change(ch, d).dg1[i - 1], 2);
    let k = int(k);
    let f = |s: &Rational| {
        let t = s + &shift;
        &t * &t / int(2) + &k * &t
    };
    // The vertex of the parabola sits at s = -k - shift.
    let vertex = -(&k + &shift);
    let lo = vertex.floor();
    let hi = &lo + Rational::one();
    Ok(std::cmp::min(f(&lo), f(&hi)))
}

/// The displayed case split: `1/8 − k²/2` if `dγ̃₁^{(i)}` is odd, else `−k²/2`.
pub fn vanishing_order_closed_form(ch: &ThetaCharacteristic, i: usize, k: i64, d: u64) -> Rational {
    let odd = base_change(ch, d).dg1[i - 1].rem_euclid(2) == 1;
    let base = if odd { rat(1, 8) } else { Rational::zero() };
    base - rat(k * k, 2)
}

/// Orders of `ϑ_d^{(i)}[1,1]` and `η^{(i)}` along `D^{(i)}_{∞,k}`.
pub fn building_block_orders(d: u64, k: i64) -> (Rational, Rational) {
    let dd = int(d as i64);
    let k = int(k);
    let f = |x: &Rational| {
        let t = x + rat(1, 2);
        &dd / int(2) * &t * &t + &k * &dd * &t
    };
    let vertex = -(&k + rat(1, 2));
    let lo = vertex.floor();
    let hi = &lo + Rational::one();
    let theta = std::cmp::min(f(&lo), f(&hi));
    (theta, rat(d as i64, 24))
}

/// Parity check helper for the reflection `u ↦ −u`.
pub fn parity_sign(ch: &ThetaCharacteristic) -> i32 {
    match ch.parity() {
        Parity::Even => 1,
        Parity::Odd => -1,
    }
}
