//! Closed formulas: group orders, counts of square-tiled surfaces, divisor
//! classes on `X_{d²}` and Euler characteristics, all in exact arithmetic.
//!
//! Values for even `d` are conjectural; callers should consult
//! [`is_conjectural`] when reporting them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Distinct prime divisors in increasing order.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `|SL₂(Z/ℓ)| = ℓ³ ∏_{p | ℓ} (1 − p⁻²)`.
pub fn delta(l: u64) -> u64 {
    assert!(l >= 1);
    let mut num = l * l * l;
    for p in prime_divisors(l) {
        num = num / (p * p) * (p * p - 1);
    }
    num
}

fn delta_q(l: u64) -> Rational {
    int(delta(l) as i64)
}

fn dq(d: u64) -> Rational {
    int(d as i64)
}

fn require_level(d: u64) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameters(format!("level d = {d} must be at least 3")));
    }
    Ok(())
}

/// Number of cusps of `X(d)`.
pub fn cusp_count(d: u64) -> Result<u64> {
    require_level(d)?;
    Ok(delta(d) / (2 * d))
}

pub fn genus_xd(d: u64) -> Result<Rational> {
    require_level(d)?;
    Ok(int(1) + (dq(d) - int(6)) * delta_q(d) / (int(24) * dq(d)))
}

/// Orbifold Euler characteristic `χ(X_{d²}) = Δ_d / 72`.
pub fn chi_x(d: u64) -> Rational {
    delta_q(d) / int(72)
}

/// Even-`d` formulas are stated only conjecturally.
pub fn is_conjectural(d: u64) -> bool {
    d.is_multiple_of(2)
}

/// Checks `(d, M, ε)` against the parity law and normalises the spin: `None`
/// and `Some(0)` are interchangeable when `M` is even.
pub fn validate_spin(d: u64, m: u64, eps: Option<u8>) -> Result<Option<u8>> {
    if d < 2 || m < 1 {
        return Err(Error::InvalidParameters(format!("d = {d}, M = {m} out of range")));
    }
    let bad = || Error::InvalidParameters(format!("spin {eps:?} is not allowed for d = {d}, M = {m}"));
    if m.is_multiple_of(2) {
        return match eps {
            None | Some(0) => Ok(None),
            _ => Err(bad()),
        };
    }
    let allowed: &[u8] = if d % 2 == 1 { &[1, 3] } else { &[0, 2] };
    match eps {
        Some(e) if allowed.contains(&e) => Ok(Some(e)),
        _ => Err(bad()),
    }
}

/// Spins admitted by `(d, M)`; `None` stands for "no spin invariant".
pub fn spins(d: u64, m: u64) -> Vec<Option<u8>> {
    if m.is_multiple_of(2) {
        vec![None]
    } else if d % 2 == 1 {
        vec![Some(3), Some(1)]
    } else {
        vec![Some(0), Some(2)]
    }
}

/// Number `t_{d,M,ε}` of reduced square-tiled surfaces in H(1,1).
pub fn count_t(d: u64, m: u64, eps: Option<u8>) -> Result<Rational> {
    let eps = validate_spin(d, m, eps)?;
    let (dd, del) = (dq(d), delta_q(d));
    let tors = delta_q(m) / dq(m);
    let value = match (m, eps) {
        (m, None) if m % 2 == 0 => rat(1, 6) * (&dd - int(1)) * del * tors,
        (1, Some(3)) => rat(1, 24) * (&dd - int(3)) * (&dd - int(5)) * del / dd,
        (1, Some(1)) => rat(1, 8) * (&dd - int(1)) * (&dd - int(3)) * del / dd,
        (1, Some(0)) => rat(1, 24) * (&dd - int(2)) * del,
        (1, Some(2)) => rat(1, 8) * (&dd - int(2)) * (&dd - int(4)) * del / dd,
        (_, Some(3 | 0)) => rat(1, 24) * (&dd - int(1)) * del * tors,
        (_, Some(1 | 2)) => rat(1, 8) * (&dd - int(1)) * del * tors,
        _ => unreachable!("validated"),
    };
    Ok(value)
}

fn validate_h2_spin(d: u64, eps: u8) -> Result<()> {
    let ok = if d % 2 == 1 {
        d >= 3 && (eps == 1 || eps == 3)
    } else {
        d > 2 && eps == 2
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "spin {eps} is not allowed in H(2) for d = {d}"
        )))
    }
}

/// Spins of reduced H(2) surfaces of degree `d`.
pub fn h2_spins(d: u64) -> Vec<u8> {
    match d {
        0..=2 => vec![],
        d if d % 2 == 1 => vec![3, 1],
        _ => vec![2],
    }
}

/// Number `w_d^ε` of reduced square-tiled surfaces in H(2).
pub fn count_w(d: u64, eps: u8) -> Result<Rational> {
    validate_h2_spin(d, eps)?;
    let (dd, del) = (dq(d), delta_q(d));
    Ok(match eps {
        3 => rat(3, 16) * (&dd - int(3)) * del / dd,
        1 => rat(3, 16) * (&dd - int(1)) * del / dd,
        _ => rat(3, 8) * (&dd - int(2)) * del / dd,
    })
}

/// A rational combination `a λ₁ + b λ₂`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DivisorClass {
    pub a: Rational,
    pub b: Rational,
}

impl DivisorClass {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(&self.a * k, &self.b * k)
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul<DivisorClass> for Rational {
    type Output = DivisorClass;
    fn mul(self, c: DivisorClass) -> DivisorClass {
        c.scale(&self)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string()].serialize(s)
    }
}

/// `(1 − 1/d) λ₁ + (2 − 2/d) λ₂`, the shape shared by all classes with `M > 1`.
fn torsion_shape(d: u64) -> DivisorClass {
    let inv = Rational::one() / dq(d);
    DivisorClass::new(int(1) - &inv, int(2) - int(2) * inv)
}

/// Class of the Teichmüller curve `T_{d,M,ε}`.
pub fn class_t(d: u64, m: u64, eps: Option<u8>) -> Result<DivisorClass> {
    if d < 3 {
        return Err(Error::InvalidParameters(format!("class of T needs d >= 3, got {d}")));
    }
    let eps = validate_spin(d, m, eps)?;
    let dd = dq(d);
    let tors = delta_q(m) / dq(m);
    let class = match (m, eps) {
        (m, None) if m % 2 == 0 => (int(2) * &dd * tors) * torsion_shape(d),
        (1, Some(3)) => {
            let p = (&dd - int(3)) * (&dd - int(5)) / &dd;
            DivisorClass::new(rat(1, 2) * &p, p)
        }
        (1, Some(1)) => {
            let p = int(3) * (&dd - int(1)) * (&dd - int(3)) / &dd;
            DivisorClass::new(rat(1, 2) * &p, p)
        }
        (1, Some(0)) => {
            let p = &dd - int(2);
            DivisorClass::new(rat(1, 2) * &p, p)
        }
        (1, Some(2)) => {
            let p = int(3) * (&dd - int(2)) * (&dd - int(4)) / &dd;
            DivisorClass::new(rat(1, 2) * &p, p)
        }
        (_, Some(3 | 0)) => (rat(1, 2) * &dd * tors) * torsion_shape(d),
        (_, Some(1 | 2)) => (rat(3, 2) * &dd * tors) * torsion_shape(d),
        _ => unreachable!("validated"),
    };
    Ok(class)
}

/// Class of the H(2) Teichmüller curve `W_{d²}^ε`.
pub fn class_w(d: u64, eps: u8) -> Result<DivisorClass> {
    validate_h2_spin(d, eps)?;
    let dd = dq(d);
    let f = match eps {
        3 => int(1) - int(3) / &dd,
        1 => int(1) - int(1) / &dd,
        _ => int(2) * (int(1) - int(2) / &dd),
    };
    Ok(DivisorClass::new(rat(3, 2) * &f, rat(9, 2) * f))
}

/// Class of the reducible locus `P_{d²}`, or of one spin component.
pub fn class_p(d: u64, eps: Option<u8>) -> Result<DivisorClass> {
    if d < 2 {
        return Err(Error::InvalidParameters(format!("d = {d} out of range")));
    }
    let dd = dq(d);
    let k = match (d % 2, eps) {
        (_, None) => int(5) - int(6) / &dd,
        (1, Some(3)) => rat(1, 2) - rat(3, 2) / &dd,
        (1, Some(1)) => rat(9, 2) - rat(9, 2) / &dd,
        (0, Some(0)) => int(2) - int(6) / &dd,
        (0, Some(2)) => int(3),
        _ => {
            return Err(Error::InvalidParameters(format!(
                "spin {eps:?} is not a component of P for d = {d}"
            )))
        }
    };
    Ok(DivisorClass::new(k.clone(), k))
}

/// Spin components of the reducible locus.
pub fn p_spins(d: u64) -> [u8; 2] {
    if d % 2 == 1 {
        [3, 1]
    } else {
        [0, 2]
    }
}

/// `λ₁·λ₂` on `X_{d²}`; the self-intersections `λᵢ²` vanish.
pub fn lambda_pairing(d: u64) -> Rational {
    delta_q(d) / int(144)
}

/// Euler characteristic of a Kobayashi geodesic curve with class `c`:
/// minus its pairing with `λ₁`.
pub fn euler_from_class(c: &DivisorClass, d: u64) -> Rational {
    -(&c.b * lambda_pairing(d))
}

pub fn count_from_euler(chi: &Rational) -> Rational {
    int(-6) * chi
}

/// Whether the two branch points of the minimal cover coincide.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum BranchType {
    Distinct,
    Equal,
}

/// Number of minimal degree-`d` covers of an elliptic curve branched over
/// `P + Q`.
pub fn kani_ems_total(d: u64, branch: BranchType) -> Rational {
    let (dd, del) = (dq(d), delta_q(d));
    match branch {
        BranchType::Distinct => rat(1, 3) * (&dd - int(1)) * del,
        BranchType::Equal => (rat(1, 6) * (&dd - int(1)) - rat(1, 24) * (int(7) * &dd - int(6)) / &dd) * del,
    }
}

/// Total number of H(1,1) surfaces with degree `d` and torsion order `M ≥ 2`,
/// summed over spins.
pub fn kani_torsion_total(d: u64, m: u64) -> Rational {
    kani_ems_total(d, BranchType::Distinct) * delta_q(m) / int(2 * m as i64)
}

pub fn is_integer(x: &Rational) -> bool {
    x.is_integer()
}

pub fn is_nonnegative_integer(x: &Rational) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Rationals are serialised as `"p/q"` strings.
pub fn rational_string(x: &Rational) -> String {
    x.to_string()
}
