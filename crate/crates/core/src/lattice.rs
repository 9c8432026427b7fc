//! Full-rank sublattices of Z² in Hermite normal form.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The lattice spanned by the columns `(a, 0)` and `(b, c)` with `a, c > 0`
/// and `0 <= b < a`. This form is unique, so equality of lattices is equality
/// of the struct.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Lattice2 {
    a: i64,
    b: i64,
    c: i64,
}

impl Lattice2 {
    pub const Z2: Lattice2 = Lattice2 { a: 1, b: 0, c: 1 };

    pub fn from_generators<I>(gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let mut a = 0i64;
        let mut pivot: Option<(i64, i64)> = None;
        for (x, y) in gens {
            if y == 0 {
                a = a.gcd(&x);
            } else if let Some((b, c)) = pivot {
                let e = c.extended_gcd(&y);
                let g = e.gcd;
                let nb = e.x * b + e.y * x;
                let rest = (y / g) * b - (c / g) * x;
                a = a.gcd(&rest);
                pivot = Some((nb, g));
            } else {
                pivot = Some(if y < 0 { (-x, -y) } else { (x, y) });
            }
            if let (Some((b, c)), true) = (pivot, a > 0) {
                pivot = Some((b.mod_floor(&a), c));
            }
        }
        match pivot {
            Some((b, c)) if a > 0 => Ok(Self {
                a,
                b: b.mod_floor(&a),
                c,
            }),
            _ => Err(Error::DegenerateLattice),
        }
    }

    /// Columns of the basis matrix `[[a, b], [0, c]]`.
    pub fn basis(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [0, self.c]]
    }

    pub fn index(&self) -> u64 {
        (self.a * self.c) as u64
    }

    pub fn contains(&self, (x, y): (i64, i64)) -> bool {
        if y % self.c != 0 {
            return false;
        }
        (x - (y / self.c) * self.b) % self.a == 0
    }

    pub fn is_full(&self) -> bool {
        self.index() == 1
    }

    /// The lattice spanned by `self` and extra vectors.
    pub fn extend<I>(&self, extra: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64)>,
    {
        let own = [(self.a, 0), (self.b, self.c)];
        Self::from_generators(own.into_iter().chain(extra)).expect("contains a full-rank lattice")
    }

    /// Order of the class of `w` in `Z² / self`.
    pub fn order_of(&self, w: (i64, i64)) -> u64 {
        let mut k = 1u64;
        while !self.contains((w.0 * k as i64, w.1 * k as i64)) {
            k += 1;
        }
        k
    }

    /// True iff `Z² / self` is cyclic.
    pub fn quotient_is_cyclic(&self) -> bool {
        // Z²/L has invariant factors gcd(a, b, c) and index / gcd(a, b, c).
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }
}

impl Default for Lattice2 {
    fn default() -> Self {
        Self::Z2
    }
}
