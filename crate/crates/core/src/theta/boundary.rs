//! One-variable boundary series of the invariant theta function:
//!
//! `θ_{1,[i]} = Σ_{s'≡−i (d)} q₁^{½(s'−½)²} ζ₁^{s'−½} e((s'+i)/2d)`,
//! `θ_{2,[i]} = Σ_{s''≡−i (d)} q₂^{½(s''+½)²} ζ₂^{s''+½} e((s''+i)/2d) e((2i−1)/4d)`.
//!
//! Exponents and root-of-unity phases are exact; products of series are
//! formed with complex coefficients.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::{int, rat, rational_string, Rational};

/// Coefficients below this modulus count as zero.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// One term `weight · e(phase) · q^{q} ζ^{zeta}` with exact data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootTerm {
    pub q: Rational,
    pub zeta: Rational,
    /// Exponent of the root of unity, reduced to `[0, 1)`.
    pub phase: Rational,
    pub weight: Rational,
}

fn reduce_phase(p: Rational) -> Rational {
    &p - p.floor()
}

impl RootTerm {
    pub fn coefficient(&self) -> Complex64 {
        let w = self.weight.to_f64().expect("finite");
        let p = self.phase.to_f64().expect("finite");
        Complex64::from_polar(w, 2.0 * PI * p)
    }
}

/// Sparse series in `q` and `ζ` with rational exponents, exact for all
/// `q`-exponents below `precision`.
#[derive(Clone, Debug)]
pub struct ExponentSeries {
    terms: BTreeMap<(Rational, Rational), Complex64>,
    pub precision: Rational,
}

impl ExponentSeries {
    pub fn from_terms(terms: &[RootTerm], precision: Rational) -> Self {
        let mut s = Self {
            terms: BTreeMap::new(),
            precision,
        };
        for t in terms {
            if t.q < s.precision {
                s.add_term(t.q.clone(), t.zeta.clone(), t.coefficient());
            }
        }
        s
    }

    fn add_term(&mut self, q: Rational, zeta: Rational, c: Complex64) {
        *self.terms.entry((q, zeta)).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Rational, Rational), &Complex64)> {
        self.terms.iter()
    }

    fn min_q(&self) -> Rational {
        self.terms
            .keys()
            .map(|(q, _)| q.clone())
            .min()
            .unwrap_or_else(|| self.precision.clone())
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= k;
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let precision = std::cmp::min(self.precision.clone(), o.precision.clone());
        let mut out = Self {
            terms: BTreeMap::new(),
            precision,
        };
        for ((q, z), c) in self.terms.iter().chain(o.terms.iter()) {
            if *q < out.precision {
                out.add_term(q.clone(), z.clone(), *c);
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let precision = std::cmp::min(&self.precision + o.min_q(), &o.precision + self.min_q());
        let mut out = Self {
            terms: BTreeMap::new(),
            precision,
        };
        for ((qa, za), ca) in &self.terms {
            for ((qb, zb), cb) in &o.terms {
                let q = qa + qb;
                if q < out.precision {
                    out.add_term(q, za + zb, ca * cb);
                }
            }
        }
        out
    }

    /// `∂/∂u` with `ζ = e(u/d)`.
    pub fn d_zeta(&self, d: u64) -> Self {
        let mut out = self.clone();
        for ((_, z), c) in out.terms.iter_mut() {
            *c *= Complex64::new(0.0, 2.0 * PI * z.to_f64().expect("finite") / d as f64);
        }
        out
    }

    /// Smallest `q`-exponent whose `ζ`-polynomial has a coefficient above
    /// [`ZERO_TOLERANCE`], with that polynomial.
    pub fn leading(&self) -> Option<(Rational, Vec<(Rational, Complex64)>)> {
        let mut by_q: BTreeMap<&Rational, Vec<(Rational, Complex64)>> = BTreeMap::new();
        for ((q, z), c) in &self.terms {
            by_q.entry(q).or_default().push((z.clone(), *c));
        }
        by_q.into_iter()
            .find(|(_, poly)| poly.iter().any(|(_, c)| c.norm() > ZERO_TOLERANCE))
            .map(|(q, poly)| {
                (
                    q.clone(),
                    poly.into_iter().filter(|(_, c)| c.norm() > ZERO_TOLERANCE).collect(),
                )
            })
    }

    pub fn coefficient(&self, q: &Rational, zeta: &Rational) -> Complex64 {
        self.terms
            .get(&(q.clone(), zeta.clone()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }
}

fn require_odd_level(d: u64) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "boundary series need odd d >= 3, got {d}"
        )));
    }
    Ok(())
}

/// Integers `s ≡ −i (mod d)` with `|s| ≤ bound`.
fn residue_class(i: i64, d: u64, bound: i64) -> impl Iterator<Item = i64> {
    let d = d as i64;
    (-bound..=bound).filter(move |s| (s + i).rem_euclid(d) == 0)
}

/// Largest `|x|` needed so that every omitted term has `½x² − |x| ≥ precision`.
fn window(precision: &Rational) -> i64 {
    let p = precision.to_f64().expect("finite").max(0.0);
    (2.0 + (1.0 + 2.0 * p).sqrt()).ceil() as i64 + 1
}

pub fn theta1_terms(i: i64, d: u64, precision: &Rational) -> Vec<RootTerm> {
    let dd = int(d as i64);
    residue_class(i, d, window(precision))
        .map(|s| {
            let x = int(s) - rat(1, 2);
            RootTerm {
                q: &x * &x / int(2),
                zeta: x,
                phase: reduce_phase(int(s + i) / (int(2) * &dd)),
                weight: int(1),
            }
        })
        .collect()
}

pub fn theta2_terms(i: i64, d: u64, precision: &Rational) -> Vec<RootTerm> {
    let dd = int(d as i64);
    residue_class(i, d, window(precision))
        .map(|s| {
            let x = int(s) + rat(1, 2);
            RootTerm {
                q: &x * &x / int(2),
                zeta: x,
                phase: reduce_phase(int(s + i) / (int(2) * &dd) + int(2 * i - 1) / (int(4) * &dd)),
                weight: int(1),
            }
        })
        .collect()
}

pub fn theta1(i: i64, d: u64, precision: &Rational) -> ExponentSeries {
    ExponentSeries::from_terms(&theta1_terms(i, d, precision), precision.clone())
}

pub fn theta2(i: i64, d: u64, precision: &Rational) -> ExponentSeries {
    ExponentSeries::from_terms(&theta2_terms(i, d, precision), precision.clone())
}

/// `θ_{1,[i]}` restricted to `ζ₁ = q₁^{t₁} e(t₂/d)`, with `0 ≤ t₁ < 1`.
/// With `derivative` set, the `t₂`-derivative is returned instead.
pub fn theta1_at_torsion(
    i: i64,
    d: u64,
    t1: &Rational,
    t2: &Rational,
    precision: &Rational,
    derivative: bool,
) -> ExponentSeries {
    let dd = int(d as i64);
    let terms: Vec<RootTerm> = theta1_terms(i, d, precision)
        .into_iter()
        .map(|t| RootTerm {
            q: &t.q + t1 * &t.zeta,
            phase: reduce_phase(&t.phase + t2 * &t.zeta / &dd),
            weight: if derivative { &t.zeta / &dd } else { t.weight.clone() },
            zeta: Rational::zero(),
        })
        .collect();
    let mut s = ExponentSeries::from_terms(&terms, precision.clone());
    if derivative {
        s = s.scale(Complex64::new(0.0, 2.0 * PI));
    }
    s
}

/// `δ(t) = θ_{1,[−1]} − θ_{1,[0]}` on the torsion section; `δ` vanishes
/// exactly when `det₂` acquires a common zero there.
pub fn torsion_difference(
    d: u64,
    t1: &Rational,
    t2: &Rational,
    precision: &Rational,
    derivative: bool,
) -> ExponentSeries {
    theta1_at_torsion(-1, d, t1, t2, precision, derivative).sub(&theta1_at_torsion(0, d, t1, t2, precision, derivative))
}

/// `det₁ = θ_{2,[0]} ∂θ_{2,[1]} − θ_{2,[1]} ∂θ_{2,[0]}`.
pub fn det1(d: u64, precision: &Rational) -> ExponentSeries {
    let (a, b) = (theta2(0, d, precision), theta2(1, d, precision));
    a.mul(&b.d_zeta(d)).sub(&b.mul(&a.d_zeta(d)))
}

/// `det₂ = θ_{1,[0]} · ½θ_{1,[1]} + ½θ_{1,[0]} · θ_{1,[1]}`.
pub fn det2(d: u64, precision: &Rational) -> ExponentSeries {
    let (a, b) = (theta1(0, d, precision), theta1(1, d, precision));
    let half = Complex64::new(0.5, 0.0);
    a.mul(&b.scale(half)).add(&a.scale(half).mul(&b))
}

#[derive(Clone, Debug, Serialize)]
pub struct LeadingTerm {
    pub q: String,
    pub zeta: String,
    pub phase: String,
}

impl LeadingTerm {
    fn of(t: &RootTerm) -> Self {
        Self {
            q: rational_string(&t.q),
            zeta: rational_string(&t.zeta),
            phase: rational_string(&t.phase),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionSample {
    pub t1: String,
    pub t2: String,
    pub leading_q: Option<String>,
    pub nonzero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub d: u64,
    pub theta2_0_leading: LeadingTerm,
    pub theta2_1_leading: LeadingTerm,
    /// Whether `θ_{2,[1]}` contains a nonzero `q₂^{(2d−1)²/8}` term.
    pub theta2_1_has_second_order_term: bool,
    pub det1_leading_q: Option<String>,
    pub det2_leading_q: Option<String>,
    /// `δ(0,0)` vanishes below the working precision.
    pub torsion_vanishes_at_zero: bool,
    /// The `t₂`-derivative of `δ` at `(0,0)` has a nonzero leading term.
    pub torsion_order_one: bool,
    pub torsion_samples: Vec<TorsionSample>,
    pub passed: bool,
}

fn leading_exact(terms: &[RootTerm]) -> RootTerm {
    terms
        .iter()
        .min_by(|a, b| a.q.cmp(&b.q))
        .cloned()
        .expect("non-empty series")
}

/// Leading-order checks behind the boundary contributions of `θ` and `∂θ`
/// and of the zero section.
pub fn boundary_expansion_checks(d: u64, max_torsion: u64) -> Result<BoundaryReport> {
    require_odd_level(d)?;
    let dd = d as i64;
    let precision = rat((2 * dd + 3) * (2 * dd + 3), 8) + int(1);
    let t20 = theta2_terms(0, d, &precision);
    let t21 = theta2_terms(1, d, &precision);
    let second = rat((2 * dd - 1) * (2 * dd - 1), 8);
    let theta2_1_has_second_order_term = theta2(1, d, &precision)
        .terms()
        .any(|((q, _), c)| *q == second && c.norm() > ZERO_TOLERANCE);
    let lead = |s: &ExponentSeries| s.leading().map(|(q, _)| rational_string(&q));
    let det1_leading_q = lead(&det1(d, &precision));
    let det2_leading_q = lead(&det2(d, &precision));

    let zero = Rational::zero();
    let torsion_vanishes_at_zero = torsion_difference(d, &zero, &zero, &precision, false)
        .leading()
        .is_none();
    let torsion_order_one = torsion_difference(d, &zero, &zero, &precision, true)
        .leading()
        .is_some();

    let mut torsion_samples = Vec::new();
    for m in 2..=max_torsion.max(2) as i64 {
        for a in 0..m {
            for b in 0..m {
                if num_integer::gcd(num_integer::gcd(a, b), m) != 1 {
                    continue;
                }
                let (t1, t2) = (rat(a, m), rat(b, m));
                let l = torsion_difference(d, &t1, &t2, &precision, false).leading();
                torsion_samples.push(TorsionSample {
                    t1: rational_string(&t1),
                    t2: rational_string(&t2),
                    nonzero: l.is_some(),
                    leading_q: l.map(|(q, _)| rational_string(&q)),
                });
            }
        }
    }

    let passed = det1_leading_q.is_some()
        && det2_leading_q.is_some()
        && torsion_vanishes_at_zero
        && torsion_order_one
        && torsion_samples.iter().all(|s| s.nonzero);
    Ok(BoundaryReport {
        d,
        theta2_0_leading: LeadingTerm::of(&leading_exact(&t20)),
        theta2_1_leading: LeadingTerm::of(&leading_exact(&t21)),
        theta2_1_has_second_order_term,
        det1_leading_q,
        det2_leading_q,
        torsion_vanishes_at_zero,
        torsion_order_one,
        torsion_samples,
        passed,
    })
}
