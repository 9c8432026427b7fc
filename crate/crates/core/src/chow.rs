//! Divisor algebra on the compactified universal family over `X_{d²}`, and
//! the pushforward that recovers the classes of the curves `T_{d,M,ε}`.
//!
//! Generators: `L_i` (pulled-back Hodge classes), `D_i` (boundary
//! components), `N_i` (zero sections). Products are truncated at degree 3,
//! the only degree that is ever pushed forward.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formulas::{self, int, rat, DivisorClass, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Generator {
    L1,
    L2,
    D1,
    D2,
    N1,
    N2,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::L1,
        Generator::L2,
        Generator::D1,
        Generator::D2,
        Generator::N1,
        Generator::N2,
    ];

    fn name(self) -> &'static str {
        match self {
            Generator::L1 => "L1",
            Generator::L2 => "L2",
            Generator::D1 => "D1",
            Generator::D2 => "D2",
            Generator::N1 => "N1",
            Generator::N2 => "N2",
        }
    }
}

pub const MAX_DEGREE: usize = 3;

/// Exponent vector over the generators in [`Generator::ALL`] order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial([u8; 6]);

impl Monomial {
    pub fn one() -> Self {
        Self([0; 6])
    }

    pub fn of(gens: &[Generator]) -> Self {
        let mut e = [0u8; 6];
        for &g in gens {
            e[g as usize] += 1;
        }
        Self(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponent(&self, g: Generator) -> u8 {
        self.0[g as usize]
    }

    fn times(&self, o: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0) {
            *a += b;
        }
        Self(e)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        let mut first = true;
        for g in Generator::ALL {
            let e = self.exponent(g);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(g.name())?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ChowExpression {
    terms: BTreeMap<Monomial, Rational>,
}

impl ChowExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::term(Rational::one(), Monomial::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn gen(g: Generator) -> Self {
        Self::term(Rational::one(), Monomial::of(&[g]))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common degree of all terms, if there is one.
    pub fn degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c * k);
        }
        out
    }

    /// Commutative product. Fails if any surviving term has degree above 3.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        match out.terms.keys().map(Monomial::degree).max() {
            Some(deg) if deg > MAX_DEGREE => Err(Error::DegreeCap(deg)),
            _ => Ok(out),
        }
    }

    /// Replaces each `D_i` by `(12/d) L_i`.
    pub fn substitute_boundary(&self, d: u64) -> Self {
        let k = rat(12, d as i64);
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut e = m.0;
            let d1 = std::mem::take(&mut e[Generator::D1 as usize]);
            let d2 = std::mem::take(&mut e[Generator::D2 as usize]);
            e[Generator::L1 as usize] += d1;
            e[Generator::L2 as usize] += d2;
            let factor = (0..d1 + d2).fold(Rational::one(), |acc, _| acc * &k);
            out.add_term(Monomial(e), c * factor);
        }
        out
    }
}

impl Add for ChowExpression {
    type Output = ChowExpression;
    fn add(mut self, o: Self) -> Self {
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for ChowExpression {
    type Output = ChowExpression;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for ChowExpression {
    type Output = ChowExpression;
    fn neg(self) -> Self {
        self.scale(&int(-1))
    }
}

impl Mul<ChowExpression> for Rational {
    type Output = ChowExpression;
    fn mul(self, e: ChowExpression) -> ChowExpression {
        e.scale(&self)
    }
}

impl fmt::Display for ChowExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

/// A class on `X_{d²}` in the basis `λ₁, λ₂, R₁, R₂`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BaseClass {
    pub lambda1: Rational,
    pub lambda2: Rational,
    pub r1: Rational,
    pub r2: Rational,
}

impl BaseClass {
    /// Eliminates the boundary classes via `R_i = (12/d) λ_i`.
    pub fn reduce(&self, d: u64) -> DivisorClass {
        let k = rat(12, d as i64);
        DivisorClass::new(&self.lambda1 + &k * &self.r1, &self.lambda2 + &k * &self.r2)
    }
}

impl Add for BaseClass {
    type Output = BaseClass;
    fn add(self, o: Self) -> Self {
        BaseClass {
            lambda1: self.lambda1 + o.lambda1,
            lambda2: self.lambda2 + o.lambda2,
            r1: self.r1 + o.r1,
            r2: self.r2 + o.r2,
        }
    }
}

impl fmt::Display for BaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})l1 + ({})l2 + ({})R1 + ({})R2",
            self.lambda1, self.lambda2, self.r1, self.r2
        )
    }
}

impl Serialize for BaseClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = BTreeMap::new();
        m.insert("lambda1", self.lambda1.to_string());
        m.insert("lambda2", self.lambda2.to_string());
        m.insert("R1", self.r1.to_string());
        m.insert("R2", self.r2.to_string());
        m.serialize(s)
    }
}

fn require_odd_level(d: u64) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameters(format!(
            "the derivation needs odd d >= 3, got {d}"
        )));
    }
    Ok(())
}

/// Class of a Hilbert Jacobi form of weight `κ` and index `m`.
pub fn jacobi_class(kappa: (Rational, Rational), m: (Rational, Rational), d: u64) -> ChowExpression {
    use Generator::*;
    let two_over_d = rat(2, d as i64);
    let n1 = &two_over_d * &m.0;
    let n2 = &two_over_d * &m.1;
    (kappa.0 + &n1) * ChowExpression::gen(L1)
        + (kappa.1 + &n2) * ChowExpression::gen(L2)
        + n1 * ChowExpression::gen(N1)
        + n2 * ChowExpression::gen(N2)
}

/// `c₁(J_θ)`: weight and index `(1/2, 1/2)`.
pub fn theta_class(d: u64) -> ChowExpression {
    jacobi_class((rat(1, 2), rat(1, 2)), (rat(1, 2), rat(1, 2)), d)
}

/// `c₁(J_∂θ)`: the derivative raises the second weight by one.
pub fn dtheta_class(d: u64) -> ChowExpression {
    jacobi_class((rat(1, 2), rat(3, 2)), (rat(1, 2), rat(1, 2)), d)
}

/// Class of the section of primitive `m`-torsion points in the first factor.
pub fn torsion_class(m: u64, d: u64) -> ChowExpression {
    let _ = d;
    use Generator::*;
    if m == 1 {
        return ChowExpression::gen(N1);
    }
    let k = rat(formulas::delta(m) as i64, m as i64);
    k * (ChowExpression::gen(N1) + ChowExpression::gen(L1))
}

/// Pushforward of a degree-3 expression to `X_{d²}`.
pub fn pushforward(e: &ChowExpression, d: u64) -> Result<BaseClass> {
    use Generator::*;
    let mut out = BaseClass::default();
    if e.is_zero() {
        return Ok(out);
    }
    if e.degree() != Some(3) {
        return Err(Error::NonHomogeneous { expected: 3 });
    }
    let d2 = int((d * d) as i64);
    for (m, c) in e.terms() {
        let k = c * &d2;
        if m.exponent(N1) == 0 || m.exponent(N2) == 0 {
            continue;
        }
        let rest = Monomial::of(&[N1, N2]);
        let third = Generator::ALL
            .into_iter()
            .find(|&g| m.exponent(g) > rest.exponent(g))
            .expect("degree three");
        match third {
            L1 => out.lambda1 += k,
            L2 => out.lambda2 += k,
            D1 => out.r1 += k,
            D2 => out.r2 += k,
            N1 => out.lambda1 -= k,
            N2 => out.lambda2 -= k,
        }
    }
    Ok(out)
}

/// `B(θ) = (1/8)(D₁ + D₂)`.
pub fn boundary_theta() -> ChowExpression {
    rat(1, 8) * (ChowExpression::gen(Generator::D1) + ChowExpression::gen(Generator::D2))
}

/// `B(∂θ) = B(θ) · c₁(J_θ)`.
pub fn boundary_dtheta(d: u64) -> Result<ChowExpression> {
    boundary_theta().multiply(&theta_class(d))
}

/// `π_* B_m(N)`: the zero section meets the boundary only for `m = 1`.
pub fn boundary_zero_section(m: u64) -> BaseClass {
    BaseClass {
        r2: if m == 1 { Rational::one() } else { Rational::zero() },
        ..BaseClass::default()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PushforwardTerms {
    pub m: u64,
    /// `π_*(c₁(J_θ) c₁(J_∂θ) N_tor)`.
    pub main: BaseClass,
    /// `π_*(B(θ) c₁(J_∂θ) N_tor)`.
    pub theta_boundary: BaseClass,
    /// `π_*(N_tor B(∂θ))`.
    pub dtheta_boundary: BaseClass,
    /// `π_* B_m(N)`.
    pub zero_section: BaseClass,
    pub total: DivisorClass,
}

/// Assembles the four contributions to `π_* O_m` for odd `d`.
pub fn pushforward_o_terms(m: u64, d: u64) -> Result<PushforwardTerms> {
    require_odd_level(d)?;
    let jt = theta_class(d);
    let jd = dtheta_class(d);
    let tor = torsion_class(m, d);
    let main = pushforward(&jt.multiply(&jd)?.multiply(&tor)?, d)?;
    let theta_boundary = pushforward(&boundary_theta().multiply(&jd)?.multiply(&tor)?, d)?;
    let dtheta_boundary = pushforward(&tor.multiply(&boundary_dtheta(d)?)?, d)?;
    let zero_section = boundary_zero_section(m);
    let total = main.reduce(d) - theta_boundary.reduce(d) - dtheta_boundary.reduce(d) - zero_section.reduce(d);
    Ok(PushforwardTerms {
        m,
        main,
        theta_boundary,
        dtheta_boundary,
        zero_section,
        total,
    })
}

pub fn pushforward_o(m: u64, d: u64) -> Result<DivisorClass> {
    Ok(pushforward_o_terms(m, d)?.total)
}

#[derive(Clone, Debug, Serialize)]
pub struct Derivation {
    pub d: u64,
    #[serde(rename = "M")]
    pub m: u64,
    pub epsilon: Option<u8>,
    pub terms: PushforwardTerms,
    /// Classes subtracted from `π_* O` before halving (`M = 1` only).
    pub subtracted: Vec<(String, DivisorClass)>,
    pub derived: DivisorClass,
    pub closed_form: DivisorClass,
    pub matches: bool,
}

/// Solves for the class of `T_{d,M,ε}` from the pushforward of the origami
/// locus and compares it with the closed form.
pub fn derive_t_class_traced(d: u64, m: u64, eps: Option<u8>) -> Result<Derivation> {
    require_odd_level(d)?;
    let eps = formulas::validate_spin(d, m, eps)?;
    let level = match (m, eps) {
        (1, Some(3)) => 1,
        (1, _) => 2,
        (m, Some(3)) => m,
        (m, _) => 2 * m,
    };
    let terms = pushforward_o_terms(level, d)?;
    let mut subtracted = Vec::new();
    if m == 1 {
        let e = eps.expect("odd M has a spin");
        let w = formulas::class_w(d, e)?;
        let p = formulas::class_p(d, Some(e))?;
        subtracted.push((format!("3 W^{e}"), w.scale(&int(3))));
        subtracted.push((format!("P^{e}"), p));
    }
    let remainder = subtracted
        .iter()
        .fold(terms.total.clone(), |acc, (_, c)| acc - c.clone());
    let derived = remainder.scale(&rat(1, 2));
    let closed_form = formulas::class_t(d, m, eps)?;
    Ok(Derivation {
        d,
        m,
        epsilon: eps,
        matches: derived == closed_form,
        terms,
        subtracted,
        derived,
        closed_form,
    })
}

pub fn derive_t_class(d: u64, m: u64, eps: Option<u8>) -> Result<DivisorClass> {
    Ok(derive_t_class_traced(d, m, eps)?.derived)
}
