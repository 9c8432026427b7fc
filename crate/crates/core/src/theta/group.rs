//! Elements of `Γ_{d²} = SL(𝔬_{d²} ⊕ 𝔬_{d²}^∨)` as 2×2 matrices over
//! `K = Q ⊕ Q`, and their images in `Sp(4, Z)`.

use std::fmt;

use num_traits::ToPrimitive;
use rand::Rng;

use super::{basis_a, basis_b, row_times, to_integer, transpose};
use crate::error::{Error, Result};
use crate::formulas::{int, rat, Rational};

pub type KElement = [Rational; 2];

fn k(a: i64, b: i64) -> KElement {
    [int(a), int(b)]
}

fn kmul(x: &KElement, y: &KElement) -> KElement {
    [&x[0] * &y[0], &x[1] * &y[1]]
}

fn kadd(x: &KElement, y: &KElement) -> KElement {
    [&x[0] + &y[0], &x[1] + &y[1]]
}

fn kneg(x: &KElement) -> KElement {
    [-x[0].clone(), -x[1].clone()]
}

/// `[[a, b], [c, e]]` with entries in `K`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PseudoMatrix {
    pub a: KElement,
    pub b: KElement,
    pub c: KElement,
    pub e: KElement,
}

type Mat2 = [[Rational; 2]; 2];

fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let entry = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

fn diag(x: &KElement) -> Mat2 {
    [[x[0].clone(), int(0)], [int(0), x[1].clone()]]
}

impl PseudoMatrix {
    pub fn identity() -> Self {
        Self {
            a: k(1, 1),
            b: k(0, 0),
            c: k(0, 0),
            e: k(1, 1),
        }
    }

    pub fn minus_identity() -> Self {
        Self {
            a: k(-1, -1),
            b: k(0, 0),
            c: k(0, 0),
            e: k(-1, -1),
        }
    }

    pub fn upper(b: KElement) -> Self {
        Self { b, ..Self::identity() }
    }

    pub fn lower(c: KElement) -> Self {
        Self { c, ..Self::identity() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            a: kadd(&kmul(&self.a, &o.a), &kmul(&self.b, &o.c)),
            b: kadd(&kmul(&self.a, &o.b), &kmul(&self.b, &o.e)),
            c: kadd(&kmul(&self.c, &o.a), &kmul(&self.e, &o.c)),
            e: kadd(&kmul(&self.c, &o.b), &kmul(&self.e, &o.e)),
        }
    }

    /// Inverse of a determinant-one element.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.e.clone(),
            b: kneg(&self.b),
            c: kneg(&self.c),
            e: self.a.clone(),
        }
    }

    pub fn det(&self) -> KElement {
        let ad = kmul(&self.a, &self.e);
        let bc = kmul(&self.b, &self.c);
        [&ad[0] - &bc[0], &ad[1] - &bc[1]]
    }

    /// The real matrix acting on the `i`-th factor of `H²`.
    pub fn component(&self, i: usize) -> [[f64; 2]; 2] {
        let f = |x: &Rational| x.to_f64().expect("finite entry");
        [[f(&self.a[i]), f(&self.b[i])], [f(&self.c[i]), f(&self.e[i])]]
    }

    /// Membership via the module conditions `a, e ∈ 𝔬`, `b ∈ (𝔬^∨)⁻¹`,
    /// `c ∈ 𝔬^∨`, `det = 1`.
    pub fn member_by_modules(&self, d: u64) -> bool {
        let dd = d as i64;
        let in_order = |x: &KElement| match (to_integer(&x[0]), to_integer(&x[1])) {
            (Some(p), Some(q)) => (p - q).rem_euclid(dd) == 0,
            _ => false,
        };
        let sqrt_d = k(dd, -dd);
        let inv_sqrt_d = [rat(1, dd), rat(-1, dd)];
        self.det() == k(1, 1)
            && in_order(&self.a)
            && in_order(&self.e)
            && in_order(&kmul(&self.b, &inv_sqrt_d))
            && in_order(&kmul(&self.c, &sqrt_d))
    }

    /// The image under the modular embedding, as a rational 4×4 matrix
    /// `[[A a* B, A b* Aᵀ], [Bᵀ c* B, Bᵀ e* Aᵀ]]`.
    pub fn embedding(&self, d: u64) -> [[Rational; 4]; 4] {
        let (a, b) = (basis_a(d), basis_b(d));
        let (at, bt) = (transpose(&a), transpose(&b));
        let blocks = [
            mat_mul(&mat_mul(&a, &diag(&self.a)), &b),
            mat_mul(&mat_mul(&a, &diag(&self.b)), &at),
            mat_mul(&mat_mul(&bt, &diag(&self.c)), &b),
            mat_mul(&mat_mul(&bt, &diag(&self.e)), &at),
        ];
        let mut out: [[Rational; 4]; 4] = Default::default();
        for (idx, blk) in blocks.iter().enumerate() {
            let (r0, c0) = (2 * (idx / 2), 2 * (idx % 2));
            for i in 0..2 {
                for j in 0..2 {
                    out[r0 + i][c0 + j] = blk[i][j].clone();
                }
            }
        }
        out
    }

    /// Membership via the embedding: the image must be an integral
    /// symplectic matrix.
    pub fn siegel(&self, d: u64) -> Option<SiegelMatrix> {
        let m = self.embedding(d);
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = to_integer(&m[i][j])?;
            }
        }
        let s = SiegelMatrix(out);
        s.is_symplectic().then_some(s)
    }

    /// Checks membership by both routes and returns the Siegel image.
    pub fn verify(&self, d: u64) -> Result<SiegelMatrix> {
        let by_modules = self.member_by_modules(d);
        match (by_modules, self.siegel(d)) {
            (true, Some(s)) => Ok(s),
            (false, None) => Err(Error::NotInGroup(self.to_string())),
            (m, s) => Err(Error::NotInGroup(format!(
                "{self}: membership routes disagree (modules {m}, embedding {})",
                s.is_some()
            ))),
        }
    }

    /// The action on `(γ̃₁, γ̃₂)`, converted back to `(γ₁, γ₂)`.
    pub fn act_tilde(&self, g1: [i64; 2], g2: [i64; 2], d: u64) -> ([i64; 2], [i64; 2]) {
        let (a, b) = (basis_a(d), basis_b(d));
        let (at, bt) = (transpose(&a), transpose(&b));
        let (t1, t2) = super::tilde(g1, g2, d);
        let diag_of = |m: Mat2| [m[0][0].clone(), m[1][1].clone()];
        let corr1 = row_times(&diag_of(mat_mul(&mat_mul(&bt, &diag(&kmul(&self.c, &self.e))), &b)), &a);
        let corr2 = row_times(
            &diag_of(mat_mul(&mat_mul(&a, &diag(&kmul(&self.a, &self.b))), &at)),
            &bt,
        );
        let n1 = kadd(&kadd(&kmul(&t1, &self.e), &kneg(&kmul(&t2, &self.c))), &corr1);
        let n2 = kadd(&kadd(&kneg(&kmul(&t1, &self.b)), &kmul(&t2, &self.a)), &corr2);
        let back = |v: KElement, m: &Mat2| {
            let r = row_times(&v, m);
            [
                to_integer(&r[0]).expect("integral characteristic"),
                to_integer(&r[1]).expect("integral characteristic"),
            ]
        };
        (back(n1, &b), back(n2, &at))
    }
}

impl fmt::Display for PseudoMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[({},{}),({},{})],[({},{}),({},{})]]",
            self.a[0], self.a[1], self.b[0], self.b[1], self.c[0], self.c[1], self.e[0], self.e[1]
        )
    }
}

/// An element of `Sp(4, Z)` in block form `[[A, B], [C, E]]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SiegelMatrix(pub [[i64; 4]; 4]);

impl SiegelMatrix {
    fn block(&self, r: usize, c: usize) -> [[i64; 2]; 2] {
        let m = &self.0;
        [[m[r][c], m[r][c + 1]], [m[r + 1][c], m[r + 1][c + 1]]]
    }

    pub fn is_symplectic(&self) -> bool {
        let j = |i: usize, k: usize| -> i64 {
            match (i, k) {
                (0, 2) | (1, 3) => 1,
                (2, 0) | (3, 1) => -1,
                _ => 0,
            }
        };
        let m = &self.0;
        (0..4).all(|r| {
            (0..4).all(|c| {
                let mut s = 0;
                for i in 0..4 {
                    for k in 0..4 {
                        s += m[i][r] * j(i, k) * m[k][c];
                    }
                }
                s == j(r, c)
            })
        })
    }

    /// `(Mγ)₁ = Eγ₁ᵀ − Cγ₂ᵀ + (CEᵀ)₀`, `(Mγ)₂ = −Bγ₁ᵀ + Aγ₂ᵀ + (ABᵀ)₀`.
    pub fn act(&self, g1: [i64; 2], g2: [i64; 2]) -> ([i64; 2], [i64; 2]) {
        let (a, b, c, e) = (self.block(0, 0), self.block(0, 2), self.block(2, 0), self.block(2, 2));
        let apply = |m: [[i64; 2]; 2], v: [i64; 2]| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
        let diag_t = |x: [[i64; 2]; 2], y: [[i64; 2]; 2]| {
            [
                x[0][0] * y[0][0] + x[0][1] * y[0][1],
                x[1][0] * y[1][0] + x[1][1] * y[1][1],
            ]
        };
        let (eg, cg, bg, ag) = (apply(e, g1), apply(c, g2), apply(b, g1), apply(a, g2));
        let (ce, ab) = (diag_t(c, e), diag_t(a, b));
        (
            [eg[0] - cg[0] + ce[0], eg[1] - cg[1] + ce[1]],
            [-bg[0] + ag[0] + ab[0], -bg[1] + ag[1] + ab[1]],
        )
    }
}

/// Elementary unipotents with entries running over bases of `(𝔬^∨)⁻¹` and
/// `𝔬^∨`, together with `−I`.
pub fn elementary_generators(d: u64) -> Vec<PseudoMatrix> {
    let dd = d as i64;
    vec![
        PseudoMatrix::upper(k(dd, -dd)),
        PseudoMatrix::upper(k(0, -dd * dd)),
        PseudoMatrix::lower([rat(1, dd), rat(-1, dd)]),
        PseudoMatrix::lower(k(0, -1)),
        PseudoMatrix::minus_identity(),
    ]
}

/// A random word of length `len` in the elementary generators and their
/// inverses.
pub fn random_element<R: Rng>(d: u64, rng: &mut R, len: usize) -> PseudoMatrix {
    let gens = elementary_generators(d);
    let mut m = PseudoMatrix::identity();
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        let g = if rng.gen_bool(0.5) { g.inverse() } else { g.clone() };
        m = m.mul(&g);
    }
    m
}
